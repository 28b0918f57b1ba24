// Copyright 2026 the pseudoqe authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pseudoqe/aligner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "pseudoqe/error.hpp"

namespace pseudoqe {

namespace {

constexpr double kMinTension = 0.1;
constexpr double kMaxTension = 14.0;

double distortion_feature(int i, int j, int n, int m) {
  return -std::fabs(static_cast<double>(i) / n - static_cast<double>(j) / m);
}

// d log Z_j / d lambda: expected feature under the normalized non-null
// distortion distribution.
double dlogz(int j, int n, int m, double lambda) {
  double num = 0.0, den = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double phi = distortion_feature(i, j, n, m);
    const double w = std::exp(lambda * phi);
    num += w * phi;
    den += w;
  }
  return num / den;
}

struct IntPair {
  std::vector<std::uint32_t> src;
  std::vector<std::uint32_t> tgt;
};

using CountTable = std::vector<std::unordered_map<std::uint32_t, double>>;

struct EStepPartial {
  CountTable counts;
  double loglik = 0.0;
  double emp_feat = 0.0;
};

}  // namespace

std::uint32_t Vocab::intern(std::string_view token) {
  auto it = ids_.find(std::string(token));
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(words_.size());
  words_.emplace_back(token);
  ids_.emplace(words_.back(), id);
  return id;
}

std::optional<std::uint32_t> Vocab::lookup(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

double AlignmentModel::prob(std::uint32_t src_id, std::uint32_t tgt_id) const {
  if (src_id < ttable_.size()) {
    const auto& row = ttable_[src_id];
    auto it = row.find(tgt_id);
    if (it != row.end()) return it->second;
  }
  return floor_;
}

std::vector<std::pair<std::string, double>> AlignmentModel::ttable_row(
    std::string_view src_token) const {
  std::vector<std::pair<std::string, double>> out;
  const auto id = src_vocab_.lookup(src_token);
  if (!id || *id >= ttable_.size()) return out;
  out.reserve(ttable_[*id].size());
  for (const auto& [f, p] : ttable_[*id]) out.emplace_back(tgt_vocab_.word(f), p);
  std::sort(out.begin(), out.end());
  return out;
}

AlignmentModel em_train(const std::vector<std::pair<TokenSeq, TokenSeq>>& bitext,
                        const AlignerConfig& cfg, TrainStats* stats) {
  if (cfg.iterations < 0) throw ConfigError("iterations must be >= 0");
  if (!(cfg.p0 > 0.0 && cfg.p0 < 1.0)) throw ConfigError("p0 must be in (0,1)");
  if (cfg.alpha < 0.0) throw ConfigError("alpha must be >= 0");
  if (!(cfg.lambda_init > 0.0)) throw ConfigError("tension must be > 0");

  TrainStats local_stats;
  TrainStats& st = stats ? *stats : local_stats;

  AlignmentModel model;
  model.null_prob_ = cfg.p0;
  model.tension_ = cfg.lambda_init;
  model.floor_ = cfg.alpha > 0.0 ? cfg.alpha : 1e-9;
  model.src_vocab_.intern("<null>");  // id 0

  std::vector<IntPair> pairs;
  pairs.reserve(bitext.size());
  for (const auto& [src, tgt] : bitext) {
    if (src.empty() || tgt.empty()) {
      ++st.pairs_skipped;
      continue;
    }
    IntPair p;
    p.src.reserve(src.size());
    p.tgt.reserve(tgt.size());
    for (const auto& tok : src) p.src.push_back(model.src_vocab_.intern(tok));
    for (const auto& tok : tgt) p.tgt.push_back(model.tgt_vocab_.intern(tok));
    pairs.push_back(std::move(p));
  }
  st.pairs_used = pairs.size();
  if (pairs.empty()) throw NoTrainableDataError("no usable sentence pairs");

  // Uniform initialization over each row's co-occurrence support.
  model.ttable_.assign(model.src_vocab_.size(), {});
  for (const IntPair& p : pairs) {
    for (std::uint32_t f : p.tgt) {
      model.ttable_[AlignmentModel::kNull][f] = 0.0;
      for (std::uint32_t e : p.src) model.ttable_[e][f] = 0.0;
    }
  }
  for (auto& row : model.ttable_) {
    if (row.empty()) continue;
    const double u = 1.0 / static_cast<double>(row.size());
    for (auto& [f, v] : row) v = u;
  }

  // (src_len, tgt_len) histogram for the tension gradient.
  std::map<std::pair<int, int>, std::size_t> size_counts;
  std::size_t total_tgt_tokens = 0;
  for (const IntPair& p : pairs) {
    ++size_counts[{static_cast<int>(p.src.size()),
                   static_cast<int>(p.tgt.size())}];
    total_tgt_tokens += p.tgt.size();
  }

  const double p0 = cfg.p0;
  const double not_null = 1.0 - p0;

  auto estep_chunk = [&](std::size_t begin, std::size_t end, EStepPartial& out) {
    out.counts.assign(model.ttable_.size(), {});
    for (std::size_t s = begin; s < end; ++s) {
      const IntPair& p = pairs[s];
      const int n = static_cast<int>(p.src.size());
      const int m = static_cast<int>(p.tgt.size());
      std::vector<double> post(static_cast<size_t>(n) + 1);
      for (int j = 1; j <= m; ++j) {
        const std::uint32_t f = p.tgt[static_cast<size_t>(j - 1)];
        double z = 0.0;
        for (int i = 1; i <= n; ++i)
          z += std::exp(model.tension() * distortion_feature(i, j, n, m));
        post[0] = p0 * model.prob(AlignmentModel::kNull, f);
        double sum = post[0];
        for (int i = 1; i <= n; ++i) {
          const double prior =
              not_null *
              std::exp(model.tension() * distortion_feature(i, j, n, m)) / z;
          post[static_cast<size_t>(i)] =
              prior * model.prob(p.src[static_cast<size_t>(i - 1)], f);
          sum += post[static_cast<size_t>(i)];
        }
        out.loglik += std::log(sum);
        out.counts[AlignmentModel::kNull][f] += post[0] / sum;
        for (int i = 1; i <= n; ++i) {
          const double q = post[static_cast<size_t>(i)] / sum;
          out.counts[p.src[static_cast<size_t>(i - 1)]][f] += q;
          out.emp_feat += distortion_feature(i, j, n, m) * q;
        }
      }
    }
  };

  constexpr std::size_t kChunk = 128;
  const std::size_t nchunks = (pairs.size() + kChunk - 1) / kChunk;
  int nworkers = cfg.workers > 0
                     ? cfg.workers
                     : static_cast<int>(std::max(1u, std::min(
                           8u, std::thread::hardware_concurrency())));
  nworkers = std::min<int>(nworkers, static_cast<int>(nchunks));

  for (int iter = 1; iter <= cfg.iterations; ++iter) {
    std::vector<EStepPartial> partials(nchunks);
    if (nworkers <= 1) {
      for (std::size_t c = 0; c < nchunks; ++c)
        estep_chunk(c * kChunk, std::min(pairs.size(), (c + 1) * kChunk),
                    partials[c]);
    } else {
      std::vector<std::thread> workers;
      std::atomic<std::size_t> next{0};
      for (int w = 0; w < nworkers; ++w)
        workers.emplace_back([&] {
          for (std::size_t c = next.fetch_add(1); c < nchunks;
               c = next.fetch_add(1))
            estep_chunk(c * kChunk, std::min(pairs.size(), (c + 1) * kChunk),
                        partials[c]);
        });
      for (auto& w : workers) w.join();
    }

    // Merge in chunk order so results do not depend on scheduling.
    CountTable counts(model.ttable_.size());
    double loglik = 0.0, emp_feat = 0.0;
    for (const EStepPartial& part : partials) {
      loglik += part.loglik;
      emp_feat += part.emp_feat;
      for (std::size_t e = 0; e < part.counts.size(); ++e)
        for (const auto& [f, c] : part.counts[e]) counts[e][f] += c;
    }
    st.iteration_loglik.push_back(loglik);

    // M-step: add-alpha normalization per row.
    double row_err = 0.0;
    for (std::size_t e = 0; e < counts.size(); ++e) {
      auto& row = model.ttable_[e];
      const auto& crow = counts[e];
      if (crow.empty()) continue;
      double tot = 0.0;
      for (const auto& [f, c] : crow) tot += c;
      const double denom = tot + cfg.alpha * static_cast<double>(crow.size());
      if (denom <= 0.0) continue;
      double sum = 0.0;
      for (const auto& [f, c] : crow) {
        const double v = (c + cfg.alpha) / denom;
        row[f] = v;
        sum += v;
      }
      row_err = std::max(row_err, std::fabs(sum - 1.0));
    }
    st.row_sum_err.push_back(row_err);

    if (cfg.lambda_steps > 0) {
      const double emp = emp_feat / static_cast<double>(total_tgt_tokens);
      for (int step = 0; step < cfg.lambda_steps; ++step) {
        double mod = 0.0;
        for (const auto& [nm, cnt] : size_counts) {
          const auto [n, m] = nm;
          double per_pair = 0.0;
          for (int j = 1; j <= m; ++j) per_pair += dlogz(j, n, m, model.tension());
          mod += per_pair * static_cast<double>(cnt);
        }
        mod /= static_cast<double>(total_tgt_tokens);
        model.tension_ += (emp - mod) * (cfg.lambda_rate / iter);
        model.tension_ = std::clamp(model.tension_, kMinTension, kMaxTension);
      }
    }
  }

  st.final_tension = model.tension();
  return model;
}

double corpus_log_likelihood(
    const AlignmentModel& model,
    const std::vector<std::pair<TokenSeq, TokenSeq>>& bitext) {
  double loglik = 0.0;
  const double p0 = model.null_prob();
  for (const auto& [src, tgt] : bitext) {
    if (src.empty() || tgt.empty()) continue;
    const int n = static_cast<int>(src.size());
    const int m = static_cast<int>(tgt.size());
    std::vector<std::optional<std::uint32_t>> sid(src.size());
    for (size_t i = 0; i < src.size(); ++i) sid[i] = model.src_vocab().lookup(src[i]);
    for (int j = 1; j <= m; ++j) {
      const auto fid = model.tgt_vocab().lookup(tgt[static_cast<size_t>(j - 1)]);
      double z = 0.0;
      for (int i = 1; i <= n; ++i)
        z += std::exp(model.tension() * distortion_feature(i, j, n, m));
      auto lex = [&](const std::optional<std::uint32_t>& e) {
        if (!e || !fid) return model.floor();
        return model.prob(*e, *fid);
      };
      double sum = p0 * lex(AlignmentModel::kNull);
      for (int i = 1; i <= n; ++i) {
        const double prior =
            (1.0 - p0) *
            std::exp(model.tension() * distortion_feature(i, j, n, m)) / z;
        sum += prior * lex(sid[static_cast<size_t>(i - 1)]);
      }
      loglik += std::log(sum);
    }
  }
  return loglik;
}

Alignment viterbi_align(const AlignmentModel& model, const TokenSeq& src,
                        const TokenSeq& tgt) {
  Alignment out;
  out.src_len = static_cast<int>(src.size());
  out.tgt_len = static_cast<int>(tgt.size());
  const int n = out.src_len;
  const int m = out.tgt_len;
  if (m == 0) return out;

  std::vector<std::optional<std::uint32_t>> sid(src.size());
  for (size_t i = 0; i < src.size(); ++i) sid[i] = model.src_vocab().lookup(src[i]);

  const double p0 = model.null_prob();
  for (int j = 1; j <= m; ++j) {
    const auto fid = model.tgt_vocab().lookup(tgt[static_cast<size_t>(j - 1)]);
    auto lex = [&](const std::optional<std::uint32_t>& e) {
      if (!e || !fid) return model.floor();
      return model.prob(*e, *fid);
    };
    // Null first; sources replace it only on a strictly better score, and
    // among sources the smaller index wins ties.
    double best = p0 * lex(AlignmentModel::kNull);
    int best_i = 0;
    if (n > 0) {
      double z = 0.0;
      for (int i = 1; i <= n; ++i)
        z += std::exp(model.tension() * distortion_feature(i, j, n, m));
      for (int i = 1; i <= n; ++i) {
        const double prior =
            (1.0 - p0) *
            std::exp(model.tension() * distortion_feature(i, j, n, m)) / z;
        const double score = prior * lex(sid[static_cast<size_t>(i - 1)]);
        if (score > best) {
          best = score;
          best_i = i;
        }
      }
    }
    if (best_i > 0) out.links.push_back({best_i - 1, j - 1});
  }
  std::sort(out.links.begin(), out.links.end());
  return out;
}

SymHeuristic sym_heuristic_from_string(const std::string& name) {
  if (name == "intersection") return SymHeuristic::Intersection;
  if (name == "union") return SymHeuristic::Union;
  if (name == "gdfa" || name == "grow-diag-final-and")
    return SymHeuristic::GrowDiagFinalAnd;
  throw ConfigError("unknown symmetrization heuristic '" + name + "'");
}

const std::string& sym_heuristic_name(SymHeuristic h) {
  static const std::string names[] = {"intersection", "union", "gdfa"};
  return names[static_cast<int>(h)];
}

Alignment transpose(const Alignment& a) {
  Alignment out;
  out.src_len = a.tgt_len;
  out.tgt_len = a.src_len;
  out.links.reserve(a.links.size());
  for (const Link& l : a.links) out.links.push_back({l.tgt, l.src});
  std::sort(out.links.begin(), out.links.end());
  return out;
}

Alignment symmetrize(const Alignment& forward, const Alignment& reverse,
                     SymHeuristic heuristic) {
  if (forward.src_len != reverse.src_len ||
      forward.tgt_len != reverse.tgt_len) {
    std::ostringstream msg;
    msg << "alignments describe different pairs: " << forward.src_len << "x"
        << forward.tgt_len << " vs " << reverse.src_len << "x"
        << reverse.tgt_len;
    throw AlignmentError(msg.str());
  }

  const std::set<Link> fwd(forward.links.begin(), forward.links.end());
  const std::set<Link> rev(reverse.links.begin(), reverse.links.end());
  std::set<Link> uni = fwd;
  uni.insert(rev.begin(), rev.end());
  std::set<Link> inter;
  std::set_intersection(fwd.begin(), fwd.end(), rev.begin(), rev.end(),
                        std::inserter(inter, inter.begin()));

  Alignment out;
  out.src_len = forward.src_len;
  out.tgt_len = forward.tgt_len;

  auto finish = [&](const std::set<Link>& links) {
    out.links.assign(links.begin(), links.end());
    return out;
  };

  switch (heuristic) {
    case SymHeuristic::Intersection:
      return finish(inter);
    case SymHeuristic::Union:
      return finish(uni);
    case SymHeuristic::GrowDiagFinalAnd:
      break;
  }

  std::set<Link> cur = inter;
  std::vector<char> src_cov(static_cast<size_t>(out.src_len), 0);
  std::vector<char> tgt_cov(static_cast<size_t>(out.tgt_len), 0);
  for (const Link& l : cur) {
    src_cov[static_cast<size_t>(l.src)] = 1;
    tgt_cov[static_cast<size_t>(l.tgt)] = 1;
  }
  auto adjacent = [&](const Link& l) {
    for (int ds = -1; ds <= 1; ++ds)
      for (int dt = -1; dt <= 1; ++dt) {
        if (ds == 0 && dt == 0) continue;
        if (cur.count({l.src + ds, l.tgt + dt})) return true;
      }
    return false;
  };

  // grow-diag: row-major sweeps until fixpoint
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Link& l : uni) {
      if (cur.count(l)) continue;
      if ((!src_cov[static_cast<size_t>(l.src)] ||
           !tgt_cov[static_cast<size_t>(l.tgt)]) &&
          adjacent(l)) {
        cur.insert(l);
        src_cov[static_cast<size_t>(l.src)] = 1;
        tgt_cov[static_cast<size_t>(l.tgt)] = 1;
        changed = true;
      }
    }
  }
  // final-and: both endpoints still uncovered
  for (const Link& l : uni) {
    if (cur.count(l)) continue;
    if (!src_cov[static_cast<size_t>(l.src)] &&
        !tgt_cov[static_cast<size_t>(l.tgt)]) {
      cur.insert(l);
      src_cov[static_cast<size_t>(l.src)] = 1;
      tgt_cov[static_cast<size_t>(l.tgt)] = 1;
    }
  }
  return finish(cur);
}

std::string to_pharaoh(const Alignment& a) {
  std::ostringstream out;
  for (size_t k = 0; k < a.links.size(); ++k) {
    if (k) out << ' ';
    out << a.links[k].src << '-' << a.links[k].tgt;
  }
  return out.str();
}

}  // namespace pseudoqe
