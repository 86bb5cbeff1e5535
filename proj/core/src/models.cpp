#include "covspec/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "covspec/error.hpp"
#include "covspec/f16.hpp"
#include "covspec/rng.hpp"
#include "covspec/stopwords.hpp"

namespace covspec {

namespace {

constexpr std::uint64_t kSaltBase = 0xb5ad4eceda1ce2a9ULL;
constexpr std::uint64_t kSaltPeak = 0x278c5a4d8419fe6bULL;
constexpr std::uint64_t kSaltShift = 0x9e6c63d0676a9a99ULL;
constexpr std::uint64_t kSaltVisual = 0x5851f42d4c957f2dULL;
constexpr std::uint64_t kSaltDraftNoise = 0x14057b7ef767814fULL;

constexpr double kBackgroundLow = -8.0;
constexpr double kBackgroundSpan = 4.0;
constexpr double kPeakMax = 10.0;
constexpr double kVisualGain = 3.0;
constexpr std::uint64_t kSaltRegime = 0x2545f4914f6cdd1dULL;
// Output positions come in spans that are either easy (confident) or hard.
constexpr std::size_t kRegimeSpan = 8;
constexpr double kEasyFraction = 0.5;

double unit(std::uint64_t key, std::uint64_t salt, std::uint64_t index) {
  return to_open_unit(SeededRng::draw(key, salt, index));
}

// Peaked score vector: background in [-8, -4], a primary peak and a lower
// secondary peak. Easy positions get a tall primary peak; hard ones spread
// it over [0, 0.7 * kPeakMax].
void fill_context_scores(std::uint64_t key, std::span<double> out, bool easy) {
  const std::size_t w = out.size();
  for (std::size_t i = 0; i < w; ++i) out[i] = kBackgroundLow + kBackgroundSpan * unit(key, kSaltBase, i);
  const std::size_t peak1 = SeededRng::draw(key, kSaltPeak, 0) % w;
  std::size_t peak2 = SeededRng::draw(key, kSaltPeak, 1) % (w - 1);
  if (peak2 >= peak1) ++peak2;
  const double u = unit(key, kSaltPeak, 2);
  const double h1 = easy ? kPeakMax * (0.8 + 0.2 * u) : 0.7 * kPeakMax * std::sqrt(u);
  const double floor = kBackgroundLow + kBackgroundSpan;
  const double h2 = floor + (h1 - floor) * (easy ? 0.5 : 1.0) * unit(key, kSaltPeak, 3);
  out[peak1] = h1;
  out[peak2] = std::min(h2, h1);
}

void normalize(std::span<double> v) {
  double n = std::sqrt(dot(v, v));
  if (n == 0.0) return;
  for (double& x : v) x /= n;
}

}  // namespace

void VisualTokenSet::validate() const {
  const std::size_t n = embeddings.rows();
  const std::size_t d = embeddings.cols();
  if (n == 0 || d == 0) fail(Errc::kInvalidVisual, "visual set needs N >= 1 and d >= 1");
  if (hidden.size() < 2) fail(Errc::kInvalidVisual, "visual set needs L >= 1 hidden layers");
  for (const Matrix& h : hidden) {
    if (h.rows() != n || h.cols() != d) fail(Errc::kInvalidVisual, "hidden-state shape mismatch");
  }
  if (!importance.empty() && importance.size() != n) {
    fail(Errc::kInvalidVisual, "importance length mismatch");
  }
}

Query Query::from_text(std::string_view text, std::size_t dim, std::uint64_t seed) {
  Query q;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) q.terms.push_back(std::move(current));
    current.clear();
  };
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '\'') {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      flush();
    }
  }
  flush();

  q.embeddings = Matrix(q.terms.size(), dim);
  for (std::size_t j = 0; j < q.terms.size(); ++j) {
    SeededRng rng(seed, hash_combine(fnv1a64("query-term"), fnv1a64(q.terms[j])));
    for (double& x : q.embeddings.row(j)) x = rng.next_normal();
    q.keyword_mask.push_back(!is_stopword(q.terms[j]));
  }
  return q;
}

std::vector<std::size_t> Query::keyword_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < keyword_mask.size(); ++j) {
    if (keyword_mask[j]) out.push_back(j);
  }
  return out;
}

std::uint64_t Query::hash() const noexcept {
  std::uint64_t h = fnv1a64("query");
  for (const auto& t : terms) h = hash_combine(h, fnv1a64(t));
  return h;
}

VisualTokenSet gen_visual(std::uint64_t seed, std::size_t n, std::size_t dim, std::size_t layers,
                          const Query& keywords, const PlantSpec& plant) {
  if (n == 0 || dim == 0 || layers == 0) {
    fail(Errc::kInvalidVisual, "gen_visual needs N, d, L >= 1");
  }
  if (plant.count > n) fail(Errc::kInvalidPlant, "planted subset larger than N");
  const auto kw = keywords.keyword_indices();
  if (plant.count > 0 && kw.empty()) fail(Errc::kInvalidPlant, "planting requires keywords");
  if (plant.count > 0 && keywords.embeddings.cols() != dim) {
    fail(Errc::kInvalidPlant, "keyword embedding dimension mismatch");
  }

  const SeededRng root(seed, "visual");
  VisualTokenSet v;
  v.embeddings = Matrix(n, dim);
  SeededRng emb = root.fork("embeddings");
  for (std::size_t i = 0; i < n; ++i) {
    for (double& x : v.embeddings.row(i)) x = emb.next_normal();
  }

  // Partial Fisher-Yates picks the planted subset.
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  SeededRng pick = root.fork("plant");
  for (std::size_t i = 0; i < plant.count; ++i) {
    const std::size_t j = i + pick.next_u64() % (n - i);
    std::swap(order[i], order[j]);
  }
  v.planted.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(plant.count));
  std::sort(v.planted.begin(), v.planted.end());

  v.importance.assign(n, plant.background_importance);
  SeededRng perp_rng = root.fork("plant-perp");
  for (std::size_t p = 0; p < v.planted.size(); ++p) {
    const std::uint32_t i = v.planted[p];
    v.importance[i] = plant.planted_importance;
    auto key = keywords.embeddings.row(kw[p % kw.size()]);
    auto row = v.embeddings.row(i);
    if (plant.plant_cosine >= 1.0) {
      std::copy(key.begin(), key.end(), row.begin());
      continue;
    }
    const double knorm = std::sqrt(dot(key, key));
    std::vector<double> khat(key.begin(), key.end());
    normalize(khat);
    std::vector<double> perp(dim);
    for (double& x : perp) x = perp_rng.next_normal();
    const double along = dot(perp, khat);
    for (std::size_t j = 0; j < dim; ++j) perp[j] -= along * khat[j];
    normalize(perp);
    const double c = std::clamp(plant.plant_cosine, -1.0, 1.0);
    const double tan_theta = std::sqrt(1.0 - c * c) / c;
    for (std::size_t j = 0; j < dim; ++j) row[j] = knorm * (khat[j] + tan_theta * perp[j]);
  }

  v.hidden.reserve(layers + 1);
  v.hidden.push_back(v.embeddings);
  SeededRng drift = root.fork("hidden");
  std::vector<double> dir(dim);
  for (std::size_t l = 1; l <= layers; ++l) {
    Matrix next = v.hidden.back();
    for (std::size_t i = 0; i < n; ++i) {
      for (double& x : dir) x = drift.next_normal();
      normalize(dir);
      const double step = plant.increment_scale * v.importance[i];
      auto row = next.row(i);
      for (std::size_t j = 0; j < dim; ++j) row[j] += step * dir[j];
    }
    v.hidden.push_back(std::move(next));
  }
  return v;
}

SyntheticModelPair::SyntheticModelPair(Vocabulary vocab, double agreement, std::uint64_t seed,
                                       double visual_weight)
    : vocab_(vocab), agreement_(agreement), seed_(seed), visual_weight_(visual_weight) {
  if (!(agreement >= 0.0 && agreement <= 1.0)) {
    fail(Errc::kConfigError, "agreement must lie in [0, 1]");
  }
  if (!(visual_weight >= 0.0 && visual_weight <= 1.0)) {
    fail(Errc::kConfigError, "visual_weight must lie in [0, 1]");
  }
}

VisualContext SyntheticModelPair::visual_context(const VisualTokenSet& visual,
                                                 std::span<const std::uint32_t> retained) const {
  VisualContext ctx;
  ctx.total_tokens = visual.count();
  ctx.ids.assign(retained.begin(), retained.end());
  std::sort(ctx.ids.begin(), ctx.ids.end());
  const std::size_t w = vocab_.size();
  ctx.bias.assign(w, 0.0);
  ctx.key = fnv1a64("visual-context");
  double total = 0.0;
  const std::uint64_t vkey = hash_combine(seed_, kSaltVisual);
  for (std::uint32_t id : ctx.ids) {
    if (id >= visual.count()) fail(Errc::kInvalidVisual, "retained visual id out of range");
    ctx.key = hash_combine(ctx.key, id);
    const double weight = visual.importance.empty() ? 1.0 : visual.importance[id];
    if (weight == 0.0) continue;
    total += weight;
    for (std::size_t t = 0; t < w; ++t) {
      ctx.bias[t] += weight * (-4.0 + 8.0 * unit(vkey, id, t));
    }
  }
  if (total > 0.0) {
    for (double& b : ctx.bias) b *= kVisualGain / total;
  }
  return ctx;
}

VisualContext SyntheticModelPair::full_context(const VisualTokenSet& visual) const {
  std::vector<std::uint32_t> all(visual.count());
  std::iota(all.begin(), all.end(), 0u);
  return visual_context(visual, all);
}

std::uint64_t SyntheticModelPair::context_key(const Query& query,
                                              std::span<const TokenId> prefix) const {
  std::uint64_t h = hash_combine(seed_, query.hash());
  for (TokenId t : prefix) {
    if (!vocab_.contains(t)) fail(Errc::kInvalidPrefix, "prefix token outside vocabulary");
    h = hash_combine(h, static_cast<std::uint64_t>(t) + 1);
  }
  return h;
}

bool SyntheticModelPair::easy_position(const Query& query, std::size_t position) const {
  const std::uint64_t span_key = hash_combine(hash_combine(seed_, query.hash()), kSaltRegime);
  return unit(span_key, position / kRegimeSpan, 0) < kEasyFraction;
}

std::vector<double> SyntheticModelPair::core(const VisualContext& visual, std::uint64_t ctx,
                                             bool easy) const {
  const std::size_t w = vocab_.size();
  if (visual.bias.size() != w) fail(Errc::kInvalidVisual, "visual context built for another vocabulary");
  std::vector<double> scores(w);
  fill_context_scores(ctx, scores, easy);
  const std::size_t shift = SeededRng::draw(ctx, kSaltShift, 0) % w;
  for (std::size_t t = 0; t < w; ++t) {
    scores[t] = (1.0 - visual_weight_) * scores[t] + visual_weight_ * visual.bias[(t + shift) % w];
  }
  return scores;
}

LogitVector SyntheticModelPair::target_logits(const VisualContext& visual, const Query& query,
                                              std::span<const TokenId> prefix) const {
  if (!visual.is_full()) fail(Errc::kInvalidVisual, "target model requires the full visual set");
  auto scores = core(visual, context_key(query, prefix), easy_position(query, prefix.size()));
  for (double& z : scores) z = f16_round(z);
  return LogitVector(std::move(scores));
}

LogitVector SyntheticModelPair::draft_logits(const VisualContext& visual, const Query& query,
                                             std::span<const TokenId> prefix) const {
  const std::uint64_t ctx = context_key(query, prefix);
  auto scores = core(visual, ctx, easy_position(query, prefix.size()));
  std::vector<double> noise(scores.size());
  fill_context_scores(hash_combine(ctx, kSaltDraftNoise), noise, false);
  for (std::size_t t = 0; t < scores.size(); ++t) {
    scores[t] = f16_round(agreement_ * scores[t] + (1.0 - agreement_) * noise[t]);
  }
  return LogitVector(std::move(scores));
}

}  // namespace covspec
