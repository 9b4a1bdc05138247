#include "quadaudit/synthcohort.hpp"

#include <cmath>
#include <cstdio>

#include "quadaudit/error.hpp"
#include "quadaudit/seeding.hpp"

namespace quadaudit::synth {

namespace {

Pass confident(Verdict v, double confidence) {
  return Pass{v, v == Verdict::kYes ? confidence : 1.0 - confidence};
}

Verdict coin(CounterRng& rng) { return rng.bernoulli(0.5) ? Verdict::kYes : Verdict::kNo; }

std::string sample_id(const std::string& prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "-%06zu", i);
  return prefix + buf;
}

std::vector<Verdict> ground_truth(const ArchetypeSpec& spec) {
  const auto yes = static_cast<std::size_t>(
      std::llround(static_cast<double>(spec.n) * spec.gt_yes_rate));
  std::vector<Verdict> gt(spec.n, Verdict::kNo);
  for (std::size_t i = 0; i < yes && i < spec.n; ++i) gt[i] = Verdict::kYes;
  // Fisher-Yates on a counter stream; std::shuffle is not portable across
  // standard libraries.
  CounterRng rng(derive_seed(spec.seed, "ground_truth"));
  for (std::size_t i = spec.n; i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(gt[i - 1], gt[j]);
  }
  return gt;
}

// Verdict of an image-grounded model looking at some other sample's image.
Verdict replacement_verdict(const std::vector<Verdict>& gt, std::size_t self, CounterRng& rng) {
  if (gt.size() < 2) return gt[self];
  std::size_t j = rng.below(gt.size() - 1);
  if (j >= self) ++j;
  return gt[j];
}

}  // namespace

std::string_view to_string(Archetype a) noexcept {
  switch (a) {
    case Archetype::kTextShortcut: return "text-shortcut";
    case Archetype::kOracleGrounded: return "oracle-grounded";
    case Archetype::kFragileGrounded: return "fragile-grounded";
    case Archetype::kRandom: return "random";
  }
  return "?";
}

std::optional<Archetype> parse_archetype(std::string_view name) noexcept {
  for (Archetype a : {Archetype::kTextShortcut, Archetype::kOracleGrounded,
                      Archetype::kFragileGrounded, Archetype::kRandom}) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

const std::vector<std::string>& finding_vocabulary() {
  static const std::vector<std::string> vocab = {
      "cardiomegaly", "pleural effusion", "atelectasis", "consolidation",
      "pneumothorax", "edema",            "nodule",      "infiltrates",
  };
  return vocab;
}

void validate(const ArchetypeSpec& spec) {
  auto fail = [](const std::string& what) { throw AuditError(ErrorKind::kInput, what); };
  if (spec.n == 0) fail("archetype n must be at least 1");
  if (spec.k == 0) fail("archetype K must be at least 1");
  if (!(spec.gt_yes_rate >= 0.0 && spec.gt_yes_rate <= 1.0)) fail("gt_yes_rate out of range");
  if (!(spec.paraphrase_flip_prob >= 0.0 && spec.paraphrase_flip_prob <= 1.0)) {
    fail("paraphrase_flip_prob out of range");
  }
  if (!(spec.confidence > 0.5 && spec.confidence <= 1.0)) fail("confidence must lie in (0.5, 1]");
}

std::vector<SampleRecord> generate(const ArchetypeSpec& spec) {
  validate(spec);
  const std::vector<Verdict> gt = ground_truth(spec);
  const std::string prefix = spec.id_prefix.empty() ? std::string(to_string(spec.kind)) : spec.id_prefix;
  const auto& vocab = finding_vocabulary();
  const double c = spec.confidence;

  std::vector<SampleRecord> records;
  records.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    CounterRng rng(derive_seed(spec.seed, "sample", i));
    SampleRecord r;
    r.sample_id = sample_id(prefix, i);
    r.model_id = spec.model_id;
    r.dataset_id = spec.dataset_id;
    r.finding = vocab[i % vocab.size()];
    r.question = "Is there " + *r.finding + "?";
    r.ground_truth = gt[i];

    std::vector<Pass> swaps;
    switch (spec.kind) {
      case Archetype::kTextShortcut: {
        const Pass p = confident(spec.shortcut_answer, c);
        r.image_original = p;
        r.image_paraphrases.assign(spec.k, p);
        r.text_only = p;
        swaps.assign(spec.include_swaps, p);
        if (spec.include_null) r.null_image = p;
        break;
      }
      case Archetype::kOracleGrounded:
      case Archetype::kFragileGrounded: {
        const double flip =
            spec.kind == Archetype::kFragileGrounded ? spec.paraphrase_flip_prob : 0.0;
        r.image_original = confident(gt[i], c);
        for (std::size_t k = 0; k < spec.k; ++k) {
          const bool flipped = flip > 0.0 && rng.bernoulli(flip);
          r.image_paraphrases.push_back(confident(flipped ? !gt[i] : gt[i], c));
        }
        r.text_only = confident(!gt[i], c);
        for (std::size_t s = 0; s < spec.include_swaps; ++s) {
          swaps.push_back(confident(replacement_verdict(gt, i, rng), c));
        }
        // A black image shows no finding.
        if (spec.include_null) r.null_image = confident(Verdict::kNo, c);
        break;
      }
      case Archetype::kRandom: {
        r.image_original = confident(coin(rng), c);
        for (std::size_t k = 0; k < spec.k; ++k) r.image_paraphrases.push_back(confident(coin(rng), c));
        r.text_only = confident(coin(rng), c);
        for (std::size_t s = 0; s < spec.include_swaps; ++s) swaps.push_back(confident(coin(rng), c));
        if (spec.include_null) r.null_image = confident(coin(rng), c);
        break;
      }
    }
    if (spec.include_swaps > 0) r.swap_passes = std::move(swaps);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<SampleRecord> generate_mixture(const std::vector<ArchetypeSpec>& components) {
  std::vector<SampleRecord> all;
  for (std::size_t c = 0; c < components.size(); ++c) {
    ArchetypeSpec spec = components[c];
    if (spec.id_prefix.empty()) {
      spec.id_prefix = std::string(to_string(spec.kind)) + "-" + std::to_string(c);
    }
    auto part = generate(spec);
    all.insert(all.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return all;
}

QuadrantMap<double> expected_fractions(const ArchetypeSpec& spec) {
  validate(spec);
  QuadrantMap<double> f{};
  const auto k = static_cast<double>(spec.k);
  switch (spec.kind) {
    case Archetype::kTextShortcut:
      f[index_of(Quadrant::kDangerous)] = 1.0;
      break;
    case Archetype::kOracleGrounded:
      f[index_of(Quadrant::kIdeal)] = 1.0;
      break;
    case Archetype::kFragileGrounded: {
      const double consistent = std::pow(1.0 - spec.paraphrase_flip_prob, k);
      f[index_of(Quadrant::kIdeal)] = consistent;
      f[index_of(Quadrant::kFragile)] = 1.0 - consistent;
      break;
    }
    case Archetype::kRandom: {
      // All K paraphrases must match the original coin; reliance is a
      // separate fair coin.
      const double consistent = std::pow(0.5, k);
      f[index_of(Quadrant::kIdeal)] = consistent * 0.5;
      f[index_of(Quadrant::kDangerous)] = consistent * 0.5;
      f[index_of(Quadrant::kFragile)] = (1.0 - consistent) * 0.5;
      f[index_of(Quadrant::kWorst)] = (1.0 - consistent) * 0.5;
      break;
    }
  }
  return f;
}

QuadrantMap<double> expected_fractions(const std::vector<ArchetypeSpec>& components) {
  QuadrantMap<double> total{};
  double n = 0.0;
  for (const ArchetypeSpec& spec : components) {
    const auto f = expected_fractions(spec);
    const auto w = static_cast<double>(spec.n);
    for (std::size_t q = 0; q < 4; ++q) total[q] += f[q] * w;
    n += w;
  }
  if (n > 0.0) {
    for (double& v : total) v /= n;
  }
  return total;
}

}  // namespace quadaudit::synth
