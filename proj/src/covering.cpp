#include "asdim/covering.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <queue>
#include <tuple>
#include <unordered_map>

#include "asdim/errors.hpp"
#include "asdim/parallel.hpp"

namespace asdim {
namespace {

IndexList normalized_target(const FiniteMetricSpace& space, std::span<const Index> target,
                            double r) {
  if (!(r > 0.0)) throw DomainError("covering radius must be positive");
  if (target.empty()) throw DomainError("covering target must be nonempty");
  IndexList t(target.begin(), target.end());
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  for (Index p : t) space.check_index(p);
  return t;
}

using Bits = std::vector<std::uint64_t>;

std::size_t popcount(const Bits& b) {
  std::size_t c = 0;
  for (auto w : b) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

bool subset_of(const Bits& a, const Bits& b) {
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k] & ~b[k]) return false;
  return true;
}

std::size_t overlap(const Bits& a, const Bits& b) {
  std::size_t c = 0;
  for (std::size_t k = 0; k < a.size(); ++k) c += static_cast<std::size_t>(std::popcount(a[k] & b[k]));
  return c;
}

struct Candidate {
  Index point;
  Bits cover;
  std::size_t size;
};

// Depth-first set cover over dominance-reduced candidates.
class ExactCoverSearch {
 public:
  ExactCoverSearch(std::vector<Candidate> candidates, std::size_t elements)
      : cands_(std::move(candidates)), elements_(elements), words_((elements + 63) / 64) {
    covering_.resize(elements_);
    for (std::size_t c = 0; c < cands_.size(); ++c)
      for (std::size_t e = 0; e < elements_; ++e)
        if (cands_[c].cover[e / 64] >> (e % 64) & 1U) covering_[e].push_back(c);
    for (const auto& c : cands_) max_size_ = std::max(max_size_, c.size);
  }

  std::vector<std::size_t> solve(std::vector<std::size_t> initial) {
    best_ = std::move(initial);
    Bits uncovered(words_, 0);
    for (std::size_t e = 0; e < elements_; ++e) uncovered[e / 64] |= std::uint64_t{1} << (e % 64);
    std::vector<std::size_t> chosen;
    recurse(uncovered, chosen);
    return best_;
  }

 private:
  void recurse(const Bits& uncovered, std::vector<std::size_t>& chosen) {
    const std::size_t left = popcount(uncovered);
    if (left == 0) {
      if (chosen.size() < best_.size()) best_ = chosen;
      return;
    }
    const std::size_t lower = chosen.size() + (left + max_size_ - 1) / max_size_;
    if (lower >= best_.size()) return;

    // Branch on the uncovered element with the fewest covering candidates.
    std::size_t pivot = elements_;
    std::size_t fewest = SIZE_MAX;
    for (std::size_t e = 0; e < elements_; ++e) {
      if (!(uncovered[e / 64] >> (e % 64) & 1U)) continue;
      if (covering_[e].size() < fewest) {
        fewest = covering_[e].size();
        pivot = e;
      }
    }
    std::vector<std::pair<std::size_t, std::size_t>> order;
    for (std::size_t c : covering_[pivot]) order.push_back({overlap(cands_[c].cover, uncovered), c});
    std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : cands_[a.second].point < cands_[b.second].point;
    });
    Bits next(words_);
    for (const auto& [gain, c] : order) {
      for (std::size_t k = 0; k < words_; ++k) next[k] = uncovered[k] & ~cands_[c].cover[k];
      chosen.push_back(c);
      recurse(next, chosen);
      chosen.pop_back();
      if (chosen.size() + 1 >= best_.size()) return;
    }
  }

  std::vector<Candidate> cands_;
  std::size_t elements_;
  std::size_t words_;
  std::size_t max_size_ = 1;
  std::vector<std::vector<std::size_t>> covering_;
  std::vector<std::size_t> best_;
};

}  // namespace

std::string_view to_string(CoverMode mode) {
  switch (mode) {
    case CoverMode::exact: return "exact";
    case CoverMode::greedy_upper: return "greedy-upper";
    case CoverMode::packing_lower: return "packing-lower";
    case CoverMode::packing_exact: return "packing-exact";
  }
  return "?";
}

bool covers(const FiniteMetricSpace& space, std::span<const Index> centers,
            std::span<const Index> target, double r) {
  std::unordered_map<Index, bool> hit;
  for (Index t : target) hit[t] = false;
  IndexList members;
  for (Index c : centers) {
    members.clear();
    space.ball_members(c, r, members);
    for (Index m : members) {
      auto it = hit.find(m);
      if (it != hit.end()) it->second = true;
    }
  }
  return std::all_of(hit.begin(), hit.end(), [](const auto& kv) { return kv.second; });
}

CoverResult covering_number_exact(const FiniteMetricSpace& space, std::span<const Index> target,
                                  double r, Index exact_cap) {
  IndexList t = normalized_target(space, target, r);
  const std::size_t m = t.size();
  const std::size_t words = (m + 63) / 64;

  // Coverage sets by symmetry: c covers t_k iff c lies in B(t_k, r).
  std::unordered_map<Index, Bits> cover;
  IndexList members;
  for (std::size_t k = 0; k < m; ++k) {
    members.clear();
    space.ball_members(t[k], r, members);
    for (Index c : members) {
      auto& bits = cover[c];
      if (bits.empty()) bits.assign(words, 0);
      bits[k / 64] |= std::uint64_t{1} << (k % 64);
    }
  }
  std::vector<Candidate> all;
  all.reserve(cover.size());
  for (auto& [point, bits] : cover) all.push_back({point, std::move(bits), 0});
  for (auto& c : all) c.size = popcount(c.cover);
  std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
    return a.size != b.size ? a.size > b.size : a.point < b.point;
  });
  std::vector<Candidate> kept;
  for (auto& c : all) {
    const bool dominated = std::any_of(kept.begin(), kept.end(),
                                       [&](const Candidate& k) { return subset_of(c.cover, k.cover); });
    if (!dominated) kept.push_back(std::move(c));
  }
  if (static_cast<Index>(kept.size()) > exact_cap)
    throw ResourceError("exact cover: " + std::to_string(kept.size()) +
                        " candidate centres after dominance exceed cap " +
                        std::to_string(exact_cap) + "; use the greedy solver");

  // Greedy over the reduced candidates seeds the incumbent.
  std::vector<std::size_t> initial;
  {
    Bits uncovered(words, 0);
    for (std::size_t e = 0; e < m; ++e) uncovered[e / 64] |= std::uint64_t{1} << (e % 64);
    while (popcount(uncovered) > 0) {
      std::size_t best = 0, gain = 0;
      for (std::size_t c = 0; c < kept.size(); ++c) {
        const std::size_t g = overlap(kept[c].cover, uncovered);
        if (g > gain) {
          gain = g;
          best = c;
        }
      }
      initial.push_back(best);
      for (std::size_t k = 0; k < words; ++k) uncovered[k] &= ~kept[best].cover[k];
    }
  }
  const std::size_t kept_count = kept.size();
  std::vector<Index> points(kept_count);
  for (std::size_t c = 0; c < kept_count; ++c) points[c] = kept[c].point;
  ExactCoverSearch search(std::move(kept), m);
  const auto chosen = search.solve(std::move(initial));

  CoverResult result;
  result.mode = CoverMode::exact;
  result.radius = r;
  for (std::size_t c : chosen) result.centers.push_back(points[c]);
  std::sort(result.centers.begin(), result.centers.end());
  result.count = static_cast<Index>(result.centers.size());
  result.target = std::move(t);
  return result;
}

CoverResult covering_number_greedy(const FiniteMetricSpace& space, std::span<const Index> target,
                                   double r) {
  IndexList t = normalized_target(space, target, r);
  const Index n = space.size();
  std::vector<std::uint8_t> uncovered(static_cast<std::size_t>(n), 0);
  for (Index p : t) uncovered[p] = 1;

  // Initial gains by symmetry: one ball per target point.
  std::vector<Index> gain(static_cast<std::size_t>(n), 0);
  IndexList touched;
  IndexList members;
  for (Index p : t) {
    members.clear();
    space.ball_members_unordered(p, r, members);
    for (Index c : members)
      if (gain[c]++ == 0) touched.push_back(c);
  }

  // Gains are kept exact by decrementing around every newly covered point;
  // heap entries whose gain no longer matches are re-pushed.
  struct Entry {
    Index gain;
    Index point;
  };
  auto worse = [](const Entry& a, const Entry& b) {
    return a.gain != b.gain ? a.gain < b.gain : a.point > b.point;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
  for (Index c : touched) heap.push({gain[c], c});

  CoverResult result;
  result.mode = CoverMode::greedy_upper;
  result.radius = r;
  std::size_t remaining = t.size();
  IndexList around;
  while (remaining > 0) {
    if (heap.empty()) throw Error("greedy cover: candidates exhausted before covering target");
    const Entry top = heap.top();
    heap.pop();
    if (top.gain != gain[top.point]) {
      if (gain[top.point] > 0) heap.push({gain[top.point], top.point});
      continue;
    }
    result.centers.push_back(top.point);
    members.clear();
    space.ball_members_unordered(top.point, r, members);
    for (Index mbr : members) {
      if (!uncovered[mbr]) continue;
      uncovered[mbr] = 0;
      --remaining;
      around.clear();
      space.ball_members_unordered(mbr, r, around);
      for (Index c : around) --gain[c];
    }
  }
  result.count = static_cast<Index>(result.centers.size());
  result.target = std::move(t);
  return result;
}

CoverResult packing_number_greedy(const FiniteMetricSpace& space, std::span<const Index> target,
                                  double r) {
  IndexList t = normalized_target(space, target, r);
  std::vector<std::uint8_t> blocked(static_cast<std::size_t>(space.size()), 0);
  CoverResult result;
  result.mode = CoverMode::packing_lower;
  result.radius = r;
  IndexList members;
  for (Index p : t) {
    if (blocked[p]) continue;
    result.centers.push_back(p);
    members.clear();
    space.ball_members_unordered(p, 2.0 * r, members);
    for (Index mbr : members) blocked[mbr] = 1;
  }
  result.count = static_cast<Index>(result.centers.size());
  result.target = std::move(t);
  return result;
}

CoverResult packing_number_exact(const FiniteMetricSpace& space, std::span<const Index> target,
                                 double r, Index exact_cap) {
  IndexList t = normalized_target(space, target, r);
  const std::size_t m = t.size();
  if (static_cast<Index>(m) > exact_cap || m > 64)
    throw ResourceError("exact packing: target of " + std::to_string(m) + " points exceeds cap " +
                        std::to_string(std::min<Index>(exact_cap, 64)));
  std::vector<std::uint64_t> conflict(m, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (i != j && space.distance(t[i], t[j]) < 2.0 * r) conflict[i] |= std::uint64_t{1} << j;

  std::uint64_t best = 0;
  // Maximum independent set in the conflict graph.
  auto recurse = [&](auto&& self, std::uint64_t chosen, std::uint64_t open) -> void {
    if (std::popcount(chosen) + std::popcount(open) <= std::popcount(best)) return;
    if (open == 0) {
      best = chosen;
      return;
    }
    const int v = std::countr_zero(open);
    const std::uint64_t bit = std::uint64_t{1} << v;
    self(self, chosen | bit, open & ~bit & ~conflict[static_cast<std::size_t>(v)]);
    self(self, chosen, open & ~bit);
  };
  const std::uint64_t all = m == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << m) - 1;
  recurse(recurse, 0, all);

  CoverResult result;
  result.mode = CoverMode::packing_exact;
  result.radius = r;
  for (std::size_t i = 0; i < m; ++i)
    if (best >> i & 1U) result.centers.push_back(t[i]);
  result.count = static_cast<Index>(result.centers.size());
  result.target = std::move(t);
  return result;
}

SandwichCertificate sandwich_certificate(const FiniteMetricSpace& space,
                                         std::span<const Index> target, double r,
                                         Index exact_cap) {
  SandwichCertificate cert;
  try {
    cert.cover_r = covering_number_exact(space, target, r, exact_cap).count;
    cert.pack_r = packing_number_exact(space, target, r).count;
    cert.cover_2r = covering_number_exact(space, target, 2.0 * r, exact_cap).count;
    cert.exact = true;
    cert.holds = cert.cover_r >= cert.pack_r && cert.pack_r >= cert.cover_2r;
    return cert;
  } catch (const ResourceError&) {
  }
  const CoverResult cover = covering_number_greedy(space, target, r);
  const CoverResult pack = packing_number_greedy(space, target, r);
  cert.cover_r = cover.count;
  cert.pack_r = pack.count;
  cert.cover_2r = covering_number_greedy(space, target, 2.0 * r).count;
  cert.exact = false;
  // Any cover dominates any packing; a maximal packing's 2r-balls cover the
  // target, which certifies pack_r >= n_2r.
  cert.holds = cert.cover_r >= cert.pack_r && covers(space, pack.centers, pack.target, 2.0 * r);
  return cert;
}

std::vector<CoveringCell> covering_grid(const FiniteMetricSpace& space, Index center,
                                        std::span<const double> r_values,
                                        std::span<const double> R_values, unsigned threads) {
  space.check_index(center);
  std::vector<CoveringCell> cells(r_values.size() * R_values.size());
  parallel_for(cells.size(), threads, [&](std::size_t k) {
    const double r = r_values[k / R_values.size()];
    const double R = R_values[k % R_values.size()];
    IndexList omega;
    space.ball_members(center, R, omega);
    CoveringCell& cell = cells[k];
    cell.r = r;
    cell.R = R;
    cell.ball_size = static_cast<Index>(omega.size());
    cell.cover = covering_number_greedy(space, omega, r).count;
    cell.packing = packing_number_greedy(space, omega, r).count;
    cell.cover_2r = covering_number_greedy(space, omega, 2.0 * r).count;
  });
  return cells;
}

}  // namespace asdim
