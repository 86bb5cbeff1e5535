#include "covspec/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "covspec/error.hpp"

namespace covspec {

namespace {

constexpr std::size_t kMaxVocab = 6;
constexpr std::size_t kMaxK = 3;
constexpr std::size_t kMaxHorizon = 3;

void fill_prefixes(std::size_t vocab, std::size_t horizon, std::vector<TokenId>& prefix,
                   const std::function<void(const std::vector<TokenId>&)>& visit) {
  visit(prefix);
  if (prefix.size() + 1 >= horizon) return;
  for (TokenId t = 0; t < vocab; ++t) {
    prefix.push_back(t);
    fill_prefixes(vocab, horizon, prefix, visit);
    prefix.pop_back();
  }
}

using Law = std::map<std::vector<TokenId>, double>;

void add(Law& law, const std::vector<TokenId>& seq, double p) {
  if (p > 0.0) law[seq] += p;
}

// One protocol round from `prefix`, recursing until the horizon is filled.
void expand(const PrefixTable& p_d, const PrefixTable& p_t, std::size_t k, std::size_t horizon,
            std::vector<TokenId>& prefix, double weight, Law& law) {
  if (prefix.size() >= horizon) {
    add(law, prefix, weight);
    return;
  }
  const std::size_t seg = std::min(k, horizon - prefix.size());
  const std::size_t base = prefix.size();

  // Walk drafted position i with the drafted tokens so far already appended
  // and accepted.
  std::function<void(std::size_t, double)> walk = [&](std::size_t i, double w) {
    if (i == seg) {
      if (prefix.size() < horizon) {
        const ProbDist& target = p_t.at(prefix);
        for (TokenId b = 0; b < target.size(); ++b) {
          if (target[b] == 0.0) continue;
          prefix.push_back(b);
          expand(p_d, p_t, k, horizon, prefix, w * target[b], law);
          prefix.pop_back();
        }
      } else {
        expand(p_d, p_t, k, horizon, prefix, w, law);
      }
      return;
    }
    const ProbDist& draft = p_d.at(prefix);
    const ProbDist& target = p_t.at(prefix);
    double reject_mass = 0.0;
    for (TokenId y = 0; y < draft.size(); ++y) {
      if (draft[y] == 0.0) continue;
      const double alpha = acceptance_prob(target[y], draft[y]);
      prefix.push_back(y);
      walk(i + 1, w * draft[y] * alpha);
      prefix.pop_back();
      reject_mass += draft[y] * (1.0 - alpha);
    }
    if (reject_mass > 0.0) {
      // Draft tokens after a rejection are discarded, so their draws
      // marginalize out; only the rejection probability matters here.
      const ProbDist fix = residual_dist(target, draft);
      for (TokenId c = 0; c < fix.size(); ++c) {
        if (fix[c] == 0.0) continue;
        prefix.push_back(c);
        expand(p_d, p_t, k, horizon, prefix, w * reject_mass * fix[c], law);
        prefix.pop_back();
      }
    }
  };
  walk(0, weight);
  prefix.resize(base);
}

double tv_at(const Law& a, const Law& b, std::size_t len) {
  Law ma, mb;
  for (const auto& [seq, p] : a) ma[std::vector<TokenId>(seq.begin(), seq.begin() + len)] += p;
  for (const auto& [seq, p] : b) mb[std::vector<TokenId>(seq.begin(), seq.begin() + len)] += p;
  double tv = 0.0;
  for (const auto& [seq, p] : ma) {
    auto it = mb.find(seq);
    tv += std::abs(p - (it == mb.end() ? 0.0 : it->second));
  }
  for (const auto& [seq, p] : mb) {
    if (!ma.contains(seq)) tv += p;
  }
  return 0.5 * tv;
}

}  // namespace

const ProbDist& PrefixTable::at(const std::vector<TokenId>& prefix) const {
  auto it = dists.find(prefix);
  if (it == dists.end()) fail(Errc::kInvalidPrefix, "prefix missing from the table");
  return it->second;
}

PrefixTable random_prefix_table(std::size_t vocab, std::size_t horizon, SeededRng& rng,
                                double sparsity) {
  Vocabulary{vocab};
  PrefixTable table;
  table.vocab = vocab;
  std::vector<TokenId> prefix;
  fill_prefixes(vocab, horizon, prefix, [&](const std::vector<TokenId>& p) {
    std::vector<double> w(vocab);
    double total = 0.0;
    for (double& x : w) {
      x = rng.next_uniform();
      if (sparsity > 0.0 && rng.next_uniform() < sparsity) x = 0.0;
      total += x;
    }
    if (total == 0.0) {
      w[rng.next_u64() % vocab] = 1.0;
      total = 1.0;
    }
    for (double& x : w) x /= total;
    table.dists.emplace(p, ProbDist(std::move(w)));
  });
  return table;
}

Law protocol_law(const PrefixTable& p_d, const PrefixTable& p_t, std::size_t k,
                 std::size_t horizon) {
  if (k == 0) fail(Errc::kInvalidK, "draft length must be at least 1");
  Law law;
  std::vector<TokenId> prefix;
  expand(p_d, p_t, k, horizon, prefix, 1.0, law);
  return law;
}

Law target_law(const PrefixTable& p_t, std::size_t horizon) {
  Law law;
  std::vector<TokenId> prefix;
  std::function<void(double)> rec = [&](double w) {
    if (prefix.size() == horizon) {
      add(law, prefix, w);
      return;
    }
    const ProbDist& d = p_t.at(prefix);
    for (TokenId t = 0; t < d.size(); ++t) {
      if (d[t] == 0.0) continue;
      prefix.push_back(t);
      rec(w * d[t]);
      prefix.pop_back();
    }
  };
  rec(1.0);
  return law;
}

double exactness_oracle(const PrefixTable& p_d, const PrefixTable& p_t, std::size_t k,
                        std::size_t horizon) {
  if (p_d.vocab > kMaxVocab || p_t.vocab > kMaxVocab || k > kMaxK || horizon > kMaxHorizon) {
    fail(Errc::kTooLarge, "enumeration is capped at |W| <= 6, k <= 3, horizon <= 3");
  }
  if (p_d.vocab != p_t.vocab) fail(Errc::kInvalidVocabulary, "tables use different vocabularies");
  if (horizon == 0) return 0.0;
  const Law proto = protocol_law(p_d, p_t, k, horizon);
  const Law ref = target_law(p_t, horizon);
  double worst = 0.0;
  for (std::size_t len = 1; len <= horizon; ++len) worst = std::max(worst, tv_at(proto, ref, len));
  return worst;
}

}  // namespace covspec
