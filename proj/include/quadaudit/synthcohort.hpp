#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "quadaudit/records.hpp"
#include "quadaudit/taxonomy.hpp"

namespace quadaudit::synth {

enum class Archetype {
  kTextShortcut,    // one fixed answer, image or not
  kOracleGrounded,  // image verdict = ground truth; text pass answers the opposite
  kFragileGrounded, // oracle-grounded, but each paraphrase flips independently
  kRandom,          // every verdict an independent fair coin
};

std::string_view to_string(Archetype a) noexcept;
std::optional<Archetype> parse_archetype(std::string_view name) noexcept;

struct ArchetypeSpec {
  Archetype kind = Archetype::kTextShortcut;
  std::size_t n = 100;
  std::size_t k = 5;
  double gt_yes_rate = 0.5;
  double paraphrase_flip_prob = 0.0;  // fragile-grounded only
  double confidence = 0.9;            // in (0.5, 1]
  std::uint64_t seed = 42;
  std::size_t include_swaps = 0;
  bool include_null = false;
  Verdict shortcut_answer = Verdict::kYes;  // text-shortcut only
  std::string model_id = "synthetic";
  std::string dataset_id = "synthetic";
  std::string id_prefix;  // defaults to the archetype name
};

/// Throws AuditError(kInput) on an out-of-range field.
void validate(const ArchetypeSpec& spec);

/// Deterministic in `spec`. Exactly round(n * gt_yes_rate) samples have
/// ground truth "yes", placed by a seeded shuffle.
std::vector<SampleRecord> generate(const ArchetypeSpec& spec);

/// Concatenation of several archetypes; each component keeps its own seed
/// and id prefix (defaulting to "<archetype>-<component index>").
std::vector<SampleRecord> generate_mixture(const std::vector<ArchetypeSpec>& components);

/// Closed-form expected quadrant fractions of one archetype.
QuadrantMap<double> expected_fractions(const ArchetypeSpec& spec);

/// Count-weighted expectation over a mixture.
QuadrantMap<double> expected_fractions(const std::vector<ArchetypeSpec>& components);

/// Fixed finding vocabulary assigned round-robin by sample index.
const std::vector<std::string>& finding_vocabulary();

}  // namespace quadaudit::synth
