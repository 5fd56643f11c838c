#include "zlab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace zlab {

namespace {

constexpr double kTol = 1e-12;

bool inside(const Interval& inner_iv, const Interval& outer) {
  const double tol = kTol * std::max(1.0, outer.length());
  return inner_iv.a >= outer.a - tol && inner_iv.b <= outer.b + tol;
}

bool contains_any_grid(const DyadicInterval& outer, const DyadicInterval& inner_iv) {
  if (outer.shift == inner_iv.shift) return outer.contains(inner_iv);
  return inside(inner_iv.as_interval(), outer.as_interval());
}

Interval tripled(const DyadicInterval& i) {
  const double l = i.length();
  return {i.left() - l, i.right() + l};
}

std::vector<DyadicInterval> unique_sorted(std::vector<DyadicInterval> s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

/// Claimed measure as disjoint [start, end) segments keyed by start.
class ClaimedSet {
 public:
  /// Leftmost free pieces of total measure `need` inside [l, r); empty when not available.
  std::vector<Interval> take(double l, double r, double need) {
    std::vector<Interval> pieces;
    double remaining = need;
    double pos = l;
    auto it = seg_.upper_bound(l);
    if (it != seg_.begin()) {
      auto prev = std::prev(it);
      if (prev->second > pos) pos = prev->second;
    }
    const double tol = kTol * std::max(1.0, r - l);
    while (remaining > tol && pos < r) {
      const double stop = (it == seg_.end()) ? r : std::min(r, it->first);
      if (stop > pos) {
        const double take_len = std::min(stop - pos, remaining);
        pieces.push_back({pos, pos + take_len});
        remaining -= take_len;
        pos += take_len;
      }
      if (remaining <= tol || it == seg_.end()) break;
      pos = std::max(pos, it->second);
      ++it;
    }
    if (remaining > tol) return {};
    for (const Interval& p : pieces) insert(p);
    return pieces;
  }

 private:
  void insert(Interval p) {
    auto it = seg_.lower_bound(p.a);
    if (it != seg_.begin()) {
      auto prev = std::prev(it);
      if (prev->second >= p.a) {
        p.a = prev->first;
        p.b = std::max(p.b, prev->second);
        it = seg_.erase(prev);
      }
    }
    while (it != seg_.end() && it->first <= p.b) {
      p.b = std::max(p.b, it->second);
      it = seg_.erase(it);
    }
    seg_[p.a] = p.b;
  }
  std::map<double, double> seg_;
};

double realized_eta(const std::vector<DyadicInterval>& s, std::vector<std::vector<Interval>>* witnesses) {
  for (int k = 0; k <= 10; ++k) {
    const double eta = k == 0 ? 15.0 / 16.0 : std::ldexp(1.0, -k);
    SparseCheck c = is_sparse(s, eta);
    if (c.sparse) {
      if (witnesses) *witnesses = std::move(c.witnesses);
      return eta;
    }
  }
  return 0.0;
}

/// Free part I ∖ ∪children as segments.
std::vector<Interval> free_part(const DyadicInterval& i, std::vector<DyadicInterval> children) {
  std::sort(children.begin(), children.end(),
            [](const DyadicInterval& x, const DyadicInterval& y) { return x.left() < y.left(); });
  std::vector<Interval> out;
  double pos = i.left();
  for (const DyadicInterval& c : children) {
    if (c.left() > pos) out.push_back({pos, c.left()});
    pos = std::max(pos, c.right());
  }
  if (pos < i.right()) out.push_back({pos, i.right()});
  return out;
}

void add_indicator(std::vector<double>& out, const SampledSignal& grid, const Interval& iv, double v) {
  auto [first, last] = sample_range(grid.a(), grid.h(), grid.size(), iv);
  for (std::size_t j = first; j < last; ++j) out[j] += v;
}

/// max lhs/rhs over points with lhs above the noise floor.
double domination_constant(const std::vector<double>& lhs, const std::vector<double>& rhs) {
  double peak = 0.0;
  for (double v : lhs) peak = std::max(peak, v);
  const double floor_v = 1e-12 * peak;
  double c = 0.0;
  for (std::size_t j = 0; j < lhs.size(); ++j) {
    if (lhs[j] <= floor_v) continue;
    c = rhs[j] > 0.0 ? std::max(c, lhs[j] / rhs[j]) : kInf;
  }
  return c;
}

std::vector<double> chi_weighted(const std::vector<double>& absf, const SampledSignal& grid,
                                 const DyadicInterval& i) {
  std::vector<double> out(absf.size());
  const double c = i.center(), l = i.length();
  for (std::size_t j = 0; j < absf.size(); ++j) {
    const double d = periodic_difference(grid.x(j), c, grid.length()) / l;
    out[j] = absf[j] * std::pow(chi(d), kDec);
  }
  return out;
}

}  // namespace

SparseCheck is_sparse(const std::vector<DyadicInterval>& input, double eta) {
  SparseCheck out;
  if (eta <= 0.0 || eta > 1.0) throw Error(ErrorCode::InvalidArgument, "eta must lie in (0,1]");
  const std::vector<DyadicInterval> s = unique_sorted(input);
  if (s.empty()) {
    out.sparse = true;
    return out;
  }

  // candidate roots: members and same-grid ancestors up to the coarsest member generation
  int coarsest = s.front().n;
  for (const auto& i : s) coarsest = std::min(coarsest, i.n);
  std::set<DyadicInterval> roots;
  for (const auto& i : s) {
    DyadicInterval r = i;
    roots.insert(r);
    while (r.n > coarsest - 1) {
      r = r.parent();
      if (!roots.insert(r).second) break;
    }
  }
  for (const DyadicInterval& r : roots) {
    double sum = 0.0;
    for (const auto& i : s)
      if (i.length() <= r.length() && contains_any_grid(r, i)) sum += i.length();
    const double ratio = sum / r.length();
    if (ratio > out.packing) {
      out.packing = ratio;
      out.worst_root = r;
    }
  }

  std::vector<std::size_t> order(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (s[x].length() != s[y].length()) return s[x].length() < s[y].length();
    return s[x].left() < s[y].left();
  });
  // witnesses are reported in the order of the input after deduplication
  std::map<DyadicInterval, std::vector<Interval>> found;
  ClaimedSet claimed;
  bool ok = true;
  for (std::size_t idx : order) {
    const DyadicInterval& i = s[idx];
    auto pieces = claimed.take(i.left(), i.right(), eta * i.length());
    if (pieces.empty()) {
      ok = false;
      break;
    }
    found[i] = std::move(pieces);
  }
  out.sparse = ok;
  if (ok) {
    for (const auto& i : input) out.witnesses.push_back(found[i]);
  }
  return out;
}

bool verify_witnesses(const SparseCollection& s, double tol) {
  if (s.witnesses.size() != s.intervals.size()) return false;
  std::vector<Interval> all;
  std::set<DyadicInterval> seen;
  for (std::size_t i = 0; i < s.intervals.size(); ++i) {
    if (!seen.insert(s.intervals[i]).second) continue;
    const Interval iv = s.intervals[i].as_interval();
    double mass = 0.0;
    for (const Interval& p : s.witnesses[i]) {
      if (p.b < p.a || !inside(p, iv)) return false;
      mass += p.length();
      all.push_back(p);
    }
    if (mass < s.eta * iv.length() * (1.0 - tol) - tol) return false;
  }
  std::sort(all.begin(), all.end(), [](const Interval& x, const Interval& y) { return x.a < y.a; });
  for (std::size_t i = 1; i < all.size(); ++i)
    if (all[i].a < all[i - 1].b - tol * std::max(1.0, all[i - 1].length())) return false;
  return true;
}

std::vector<double> sparse_operator_apply(const std::vector<DyadicInterval>& s, const SampledSignal& f,
                                          const OrliczSpace& x, double p, Tail tail) {
  const std::vector<double> absf = f.abs();
  std::vector<double> avg(s.size());
  parallel_for(s.size(), [&](std::size_t i) {
    avg[i] = local_average(absf, f.a(), f.b(), s[i].as_interval(), x, tail);
  });
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) add_indicator(out, f, s[i].as_interval(), std::pow(avg[i], p));
  if (p != 1.0)
    for (double& v : out) v = std::pow(v, 1.0 / p);
  return out;
}

double sparse_form(const std::vector<DyadicInterval>& s, const SampledSignal& f1, const SampledSignal& f2,
                   const OrliczSpace& x1, const OrliczSpace& x2, Tail tail) {
  const std::vector<double> a1 = f1.abs(), a2 = f2.abs();
  std::vector<double> terms(s.size());
  parallel_for(s.size(), [&](std::size_t i) {
    const Interval iv = s[i].as_interval();
    terms[i] = iv.length() * local_average(a1, f1.a(), f1.b(), iv, x1, tail) *
               local_average(a2, f2.a(), f2.b(), iv, x2, tail);
  });
  double sum = 0.0;
  for (double t : terms) sum += t;
  return sum;
}

std::vector<DyadicInterval> StoppingCollection::l_prime() const {
  std::set<DyadicInterval> out;
  for (const auto& l : this->l)
    for (int j = -1; j <= 1; ++j) {
      const DyadicInterval c = l.translate(j);
      if (root.contains(c)) out.insert(c);
    }
  return {out.begin(), out.end()};
}

std::vector<DyadicInterval> StoppingCollection::l_second() const {
  const std::vector<DyadicInterval> lp = l_prime();
  std::vector<DyadicInterval> out;
  for (const auto& c : lp) {
    bool maximal = true;
    for (const auto& d : lp)
      if (d != c && d.contains(c)) {
        maximal = false;
        break;
      }
    if (maximal) out.push_back(c);
  }
  return out;
}

bool StoppingCollection::in_good(const DyadicInterval& g) const {
  if (!root.contains(g)) return false;
  for (const auto& c : l)
    if (inside(g.as_interval(), tripled(c))) return false;
  return true;
}

bool StoppingCollection::disjoint() const {
  for (std::size_t i = 0; i < l.size(); ++i)
    for (std::size_t j = i + 1; j < l.size(); ++j)
      if (!l[i].disjoint(l[j])) return false;
  return true;
}

double stopping_lambda(const StoppingCollection& sc, const SampledSignal& f, const OrliczSpace& x) {
  const std::vector<double> absf = f.abs();
  const std::vector<double> m = orlicz_maximal(absf, f.a(), f.b(), x);
  std::vector<char> in_b(f.size(), 0);
  double sup_inf = 0.0;
  for (const auto& c : sc.l) {
    auto [first, last] = sample_range(f.a(), f.h(), f.size(), c.as_interval());
    double inf_m = kInf;
    for (std::size_t j = first; j < last; ++j) {
      in_b[j] = 1;
      inf_m = std::min(inf_m, m[j]);
    }
    if (last > first) sup_inf = std::max(sup_inf, inf_m);
  }
  auto [first, last] = sample_range(f.a(), f.h(), f.size(), tripled(sc.root));
  double sup_f = 0.0;
  for (std::size_t j = first; j < last; ++j)
    if (!in_b[j]) sup_f = std::max(sup_f, absf[j]);
  return sup_f + sup_inf;
}

std::string node_label(const DyadicInterval& i) {
  std::ostringstream os;
  os << i.n << ":" << i.k << ":" << i.shift;
  return os.str();
}

TileCollection restrict_tiles(const TileCollection& q, const Interval& region) {
  TileCollection out;
  out.component_count = q.component_count;
  for (std::size_t i = 0; i < q.size(); ++i)
    if (inside(q.tiles[i].time.as_interval(), region)) {
      out.tiles.push_back(q.tiles[i]);
      out.component.push_back(q.component[i]);
    }
  return out;
}

std::vector<double> vector_model_norm(const TileEngine& engine, const TileCollection& q, const SampledSignal& f) {
  const std::size_t n = engine.grid().size();
  std::vector<double> out(n, 0.0);
  if (q.empty()) return out;
  const auto parts = engine.apply_grouped(q, q.component, q.component_count, f);
  for (const auto& p : parts)
    for (std::size_t j = 0; j < n; ++j) out[j] += std::norm(p[j]);
  for (double& v : out) v = std::sqrt(v);
  return out;
}

std::vector<DyadicInterval> sharp_recover(const std::vector<DyadicInterval>& s, int levels) {
  std::set<DyadicInterval> out(s.begin(), s.end());
  for (const DyadicInterval& i : s) {
    for (int k = 0; k < levels; ++k) {
      const double half = 1.5 * std::ldexp(i.length(), k);
      const Interval target{i.center() - half, i.center() + half};
      bool done = false;
      for (int g = i.n - k - 2; g >= i.n - k - 5 && !done; --g)
        for (int t = 0; t < 3 && !done; ++t) {
          const DyadicInterval j = dyadic_containing(target.a, g, t);
          if (j.right() >= target.b - kTol * j.length()) {
            out.insert(j);
            done = true;
          }
        }
    }
  }
  return {out.begin(), out.end()};
}

double calibrate_theta(const std::vector<SampledSignal>& corpus, const SingularSet& xi, const OrliczSpace& x,
                       const DyadicInterval& root, double zygmund_star, int generations) {
  double needed = 0.0;
  for (const SampledSignal& f : corpus) {
    const TileEngine engine(f);
    const TileCollection all = tiles_for_set(xi, f);
    const std::vector<double> absf = f.abs();
    std::vector<DyadicInterval> nodes{root};
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].n - root.n < generations) {
        auto [c0, c1] = nodes[i].children();
        nodes.push_back(c0);
        nodes.push_back(c1);
      }
    std::vector<double> per(nodes.size() * 3, 0.0);
    parallel_for(per.size(), [&](std::size_t idx) {
      const DyadicInterval& i = nodes[idx / 3];
      const DyadicInterval shifted = i.translate(static_cast<std::int64_t>(idx % 3) - 1);
      const std::vector<double> v = vector_model_norm(engine, restrict_tiles(all, shifted.as_interval()), f);
      const double avg = local_average(absf, f.a(), f.b(), i.as_interval(), x, Tail::Plus);
      auto [first, last] = sample_range(f.a(), f.h(), f.size(), i.as_interval());
      std::vector<double> vals(v.begin() + static_cast<long>(first), v.begin() + static_cast<long>(last));
      const auto allowed = static_cast<std::size_t>(std::floor(std::ldexp(i.length(), -9) / f.h() + 1e-9));
      if (allowed >= vals.size()) return;
      std::nth_element(vals.begin(), vals.begin() + static_cast<long>(allowed), vals.end(), std::greater<>());
      const double v_crit = vals[allowed];
      if (v_crit <= 0.0) return;
      per[idx] = avg > 0.0 ? v_crit / (zygmund_star * avg) : kInf;
    });
    for (double v : per) needed = std::max(needed, v);
  }
  if (std::isinf(needed)) throw Error(ErrorCode::BudgetViolation, "calibration met a zero average with nonzero output");
  double theta = 1.0;
  while (theta < needed) theta *= 2.0;
  return theta;
}

namespace {

struct RoughNode {
  DyadicInterval i;
  double lambda = 0.0;
  std::vector<DyadicInterval> children;
  double budget = 0.0;
  double constant = 0.0;
  std::vector<double> v;  // kept only for the root
};

/// Maximal L ∈ 𝒟(I) with |L ∩ E| > |L|/8, top-down, left to right.
void select_dense(const DyadicInterval& j, const std::vector<char>& e, const SampledSignal& grid,
                  std::vector<DyadicInterval>& out) {
  auto [first, last] = sample_range(grid.a(), grid.h(), grid.size(), j.as_interval());
  if (last == first) return;
  std::size_t count = 0;
  for (std::size_t s = first; s < last; ++s) count += e[s] ? 1 : 0;
  if (count == 0) return;
  if (static_cast<double>(count) * grid.h() > j.length() / 8.0) {
    out.push_back(j);
    return;
  }
  if (j.length() < 2.0 * grid.h()) return;
  auto [c0, c1] = j.children();
  select_dense(c0, e, grid, out);
  select_dense(c1, e, grid, out);
}

bool expand_rough(RoughNode& node, const SampledSignal& f, const std::vector<double>& absf,
                  const TileEngine& engine, const TileCollection& all, const OrliczSpace& x, double theta,
                  double zstar, bool keep_v) {
  const DyadicInterval& i = node.i;
  node.lambda = local_average(absf, f.a(), f.b(), i.as_interval(), x, Tail::Plus);
  const std::vector<double> v = vector_model_norm(engine, restrict_tiles(all, tripled(i)), f);
  if (keep_v) node.v = v;
  auto [first, last] = sample_range(f.a(), f.h(), f.size(), i.as_interval());
  if (i.length() >= 2.0 * f.h()) {
    const std::vector<double> m = orlicz_maximal(chi_weighted(absf, f, i), f.a(), f.b(), x);
    std::vector<char> e(f.size(), 0);
    const double t_v = 3.0 * theta * zstar * node.lambda;
    const double t_m = std::ldexp(node.lambda, 15);
    for (std::size_t j = first; j < last; ++j) e[j] = (v[j] > t_v || m[j] > t_m) ? 1 : 0;
    select_dense(i, e, f, node.children);
  }
  double mass = 0.0;
  for (const auto& c : node.children) mass += c.length();
  node.budget = mass / i.length();
  // local domination ratio on the part of I not covered by children
  std::vector<char> covered(f.size(), 0);
  for (const auto& c : node.children) {
    auto [c0, c1] = sample_range(f.a(), f.h(), f.size(), c.as_interval());
    for (std::size_t j = c0; j < c1; ++j) covered[j] = 1;
  }
  double peak = 0.0;
  for (std::size_t j = first; j < last; ++j)
    if (!covered[j]) peak = std::max(peak, v[j]);
  node.constant = node.lambda > 0.0 ? peak / node.lambda : (peak > 0.0 ? kInf : 0.0);
  return node.budget <= 1.0 / 16.0;
}

}  // namespace

RoughResult build_sparse_rough(const SampledSignal& f, const SingularSet& xi, const OrliczSpace& x,
                               const RoughConfig& cfg) {
  RoughResult res;
  const TileEngine engine(f);
  const TileCollection all = tiles_for_set(xi, f);
  const std::vector<double> absf = f.abs();
  double theta = cfg.theta > 0.0 ? cfg.theta
                                 : calibrate_theta({f}, xi, x, cfg.root, cfg.zygmund_star);

  std::vector<RoughNode> nodes;
  bool ok = false;
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    nodes.clear();
    nodes.push_back(RoughNode{cfg.root, 0.0, {}, 0.0, 0.0, {}});
    ok = true;
    std::size_t level_begin = 0;
    while (level_begin < nodes.size() && ok) {
      const std::size_t level_end = nodes.size();
      std::vector<char> passed(level_end - level_begin, 1);
      parallel_for(level_end - level_begin, [&](std::size_t t) {
        RoughNode& node = nodes[level_begin + t];
        passed[t] = expand_rough(node, f, absf, engine, all, x, theta, cfg.zygmund_star, level_begin + t == 0) ? 1 : 0;
      });
      for (char p : passed) ok = ok && p;
      if (!ok) break;
      for (std::size_t t = level_begin; t < level_end; ++t)
        for (const auto& c : nodes[t].children) nodes.push_back(RoughNode{c, 0.0, {}, 0.0, 0.0, {}});
      level_begin = level_end;
    }
    if (ok) break;
    log_debug("rough build: budget exceeded at theta=" + std::to_string(theta) + ", doubling");
    theta *= 2.0;
    ++res.retries;
  }
  if (!ok) throw Error(ErrorCode::BudgetViolation, "child budget exceeded after " + std::to_string(cfg.max_retries) + " retries");
  res.theta = theta;

  std::vector<DyadicInterval> s;
  for (const auto& nd : nodes) {
    s.push_back(nd.i);
    res.tailed.witnesses.push_back(free_part(nd.i, nd.children));
    res.audit.push_back({node_label(nd.i), nd.budget, nd.constant});
    res.max_budget = std::max(res.max_budget, nd.budget);
  }
  res.tailed.intervals = s;
  res.tailed.eta = 1.0 - res.max_budget;

  res.lhs.assign(f.size(), 0.0);
  {
    auto [first, last] = sample_range(f.a(), f.h(), f.size(), cfg.root.as_interval());
    for (std::size_t j = first; j < last; ++j) res.lhs[j] = nodes[0].v[j];
  }
  res.rhs_tailed.assign(f.size(), 0.0);
  for (const auto& nd : nodes) add_indicator(res.rhs_tailed, f, nd.i.as_interval(), nd.lambda);
  res.constant_tailed = domination_constant(res.lhs, res.rhs_tailed);

  res.sharp.intervals = sharp_recover(s, cfg.recover_levels);
  res.sharp.eta = realized_eta(res.sharp.intervals, &res.sharp.witnesses);
  res.rhs_sharp = sparse_operator_apply(res.sharp.intervals, f, x, 1.0, Tail::None);
  res.constant_sharp = domination_constant(res.lhs, res.rhs_sharp);
  return res;
}

namespace {

void select_stopping(const DyadicInterval& j, const std::vector<double>& a1, const std::vector<double>& a2,
                     const SampledSignal& grid, const OrliczSpace& x1, const OrliczSpace& x2, double t1,
                     double t2, std::vector<DyadicInterval>& out) {
  if (j.length() < grid.h()) return;
  const Interval iv = j.as_interval();
  const double v1 = local_average(a1, grid.a(), grid.b(), iv, x1);
  const double v2 = local_average(a2, grid.a(), grid.b(), iv, x2);
  if (v1 > t1 || v2 > t2) {
    out.push_back(j);
    return;
  }
  if (v1 == 0.0 && v2 == 0.0) return;
  auto [c0, c1] = j.children();
  select_stopping(c0, a1, a2, grid, x1, x2, t1, t2, out);
  select_stopping(c1, a1, a2, grid, x1, x2, t1, t2, out);
}

}  // namespace

BilinearResult build_sparse_bilinear(const SampledSignal& f1, const SampledSignal& f2, const SingularSet& xi,
                                     const OrliczSpace& x1, const OrliczSpace& x2, const TileCollection& q_in,
                                     const BilinearConfig& cfg) {
  if (!f1.same_grid(f2)) throw Error(ErrorCode::GridMismatch, "bilinear inputs on different grids");
  BilinearResult res;
  const std::vector<double> a1 = f1.abs(), a2 = f2.abs();
  const DyadicInterval& i0 = cfg.root;
  const TileCollection q = q_in.empty() ? restrict_tiles(tiles_for_set(xi, f1), tripled(i0)) : q_in;

  std::vector<DyadicInterval> nodes{i0.translate(-1), i0, i0.translate(1)};
  std::vector<std::vector<DyadicInterval>> kids;
  std::size_t level_begin = 0;
  while (level_begin < nodes.size()) {
    const std::size_t level_end = nodes.size();
    std::vector<StoppingCollection> level(level_end - level_begin);
    parallel_for(level.size(), [&](std::size_t t) {
      const DyadicInterval& i = nodes[level_begin + t];
      StoppingCollection& sc = level[t];
      sc.root = i;
      if (i.length() < 2.0 * f1.h()) return;
      const Interval big = tripled(i);
      const double t1 = cfg.theta * local_average(a1, f1.a(), f1.b(), big, x1);
      const double t2 = cfg.theta * local_average(a2, f2.a(), f2.b(), big, x2);
      for (int j = -1; j <= 1; ++j) {
        auto [c0, c1] = i.translate(j).children();
        select_stopping(c0, a1, a2, f1, x1, x2, t1, t2, sc.l);
        select_stopping(c1, a1, a2, f1, x1, x2, t1, t2, sc.l);
      }
    });
    for (std::size_t t = 0; t < level.size(); ++t) {
      std::vector<DyadicInterval> children = level[t].l_second();
      res.nested = res.nested && level[t].disjoint();
      for (const auto& c : children) res.nested = res.nested && level[t].root.contains(c) && c != level[t].root;
      kids.push_back(children);
      res.stopping.push_back(std::move(level[t]));
    }
    for (std::size_t t = level_begin; t < level_end; ++t)
      for (const auto& c : kids[t]) nodes.push_back(c);
    level_begin = level_end;
  }

  // tiles go to the deepest node containing I_P; larger tiles to the nearest root whose 3I holds them
  std::map<DyadicInterval, int> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index.emplace(nodes[i], static_cast<int>(i));
  std::vector<int> group(q.size(), -1);
  for (std::size_t t = 0; t < q.size(); ++t) {
    DyadicInterval c = q.tiles[t].time;
    while (c.n >= i0.n) {
      auto it = index.find(c);
      if (it != index.end()) {
        group[t] = it->second;
        break;
      }
      c = c.parent();
    }
    if (group[t] < 0) {
      double best = kInf;
      for (int r = 0; r < 3; ++r) {
        const double d = std::abs(nodes[static_cast<std::size_t>(r)].center() - q.tiles[t].time.center());
        if (inside(q.tiles[t].time.as_interval(), tripled(nodes[static_cast<std::size_t>(r)])) && d < best) {
          best = d;
          group[t] = r;
        }
      }
    }
    if (group[t] < 0) throw Error(ErrorCode::SupportViolation, "tile outside the tripled root");
  }

  const TileEngine engine(f1);
  const auto parts = engine.apply_grouped(q, group, static_cast<int>(nodes.size()), f1);
  cplx total(0.0);
  std::vector<double> sizes(nodes.size(), 0.0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const cplx v = inner(parts[i], f2);
    total += v;
    sizes[i] = std::abs(v);
    res.node_form_sum += sizes[i];
  }
  res.form = std::abs(total);

  std::vector<double> lam1(nodes.size()), lam2(nodes.size()), avg1(nodes.size()), avg2(nodes.size()),
      big1(nodes.size()), big2(nodes.size());
  const std::vector<double> m1 = orlicz_maximal(a1, f1.a(), f1.b(), x1);
  const std::vector<double> m2 = orlicz_maximal(a2, f2.a(), f2.b(), x2);
  auto lambda_of = [&](const StoppingCollection& sc, const std::vector<double>& absf, const std::vector<double>& m) {
    std::vector<char> in_b(absf.size(), 0);
    double sup_inf = 0.0;
    for (const auto& c : sc.l) {
      auto [first, last] = sample_range(f1.a(), f1.h(), f1.size(), c.as_interval());
      double inf_m = kInf;
      for (std::size_t j = first; j < last; ++j) {
        in_b[j] = 1;
        inf_m = std::min(inf_m, m[j]);
      }
      if (last > first) sup_inf = std::max(sup_inf, inf_m);
    }
    auto [first, last] = sample_range(f1.a(), f1.h(), f1.size(), tripled(sc.root));
    double sup_f = 0.0;
    for (std::size_t j = first; j < last; ++j)
      if (!in_b[j]) sup_f = std::max(sup_f, absf[j]);
    return sup_f + sup_inf;
  };
  parallel_for(nodes.size(), [&](std::size_t i) {
    const Interval iv = nodes[i].as_interval();
    avg1[i] = local_average(a1, f1.a(), f1.b(), iv, x1);
    avg2[i] = local_average(a2, f2.a(), f2.b(), iv, x2);
    big1[i] = local_average(a1, f1.a(), f1.b(), tripled(nodes[i]), x1);
    big2[i] = local_average(a2, f2.a(), f2.b(), tripled(nodes[i]), x2);
    lam1[i] = lambda_of(res.stopping[i], a1, m1);
    lam2[i] = lambda_of(res.stopping[i], a2, m2);
  });
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double len = nodes[i].length();
    res.sparse_value += len * avg1[i] * avg2[i];
    if (big1[i] > 0.0) res.lambda_ratio[0] = std::max(res.lambda_ratio[0], lam1[i] / big1[i]);
    if (big2[i] > 0.0) res.lambda_ratio[1] = std::max(res.lambda_ratio[1], lam2[i] / big2[i]);
    const double den = len * lam1[i] * lam2[i];
    const double c = den > 0.0 ? sizes[i] / den : (sizes[i] > 0.0 ? kInf : 0.0);
    res.max_node_constant = std::max(res.max_node_constant, c);
    double mass = 0.0;
    for (const auto& k : kids[i]) mass += k.length();
    res.audit.push_back({node_label(nodes[i]), mass / len, c});
  }
  res.constant = res.sparse_value > 0.0 ? res.form / res.sparse_value : (res.form > 0.0 ? kInf : 0.0);
  res.s.intervals = nodes;
  res.s.eta = realized_eta(nodes, &res.s.witnesses);
  return res;
}

CarlesonSequence tile_carleson_sequence(const SampledSignal& f, const SingularSet& xi,
                                        std::optional<DyadicInterval> root) {
  TileCollection q = tiles_for_set(xi, f);
  if (root) {
    const std::vector<double> absf = f.abs();
    double peak = 0.0;
    for (double v : absf) peak = std::max(peak, v);
    const double grow = root->length() / 10.0;
    const Interval hull{root->left() - grow, root->right() + grow};
    for (std::size_t j = 0; j < f.size(); ++j)
      if (absf[j] > 1e-12 * peak && !hull.contains_halfopen(f.x(j)))
        throw Error(ErrorCode::SupportViolation, "f is not supported in (1+1/5)Q");
    TileCollection local;
    local.component_count = q.component_count;
    for (std::size_t t = 0; t < q.size(); ++t)
      if (root->contains(q.tiles[t].time)) {
        local.tiles.push_back(q.tiles[t]);
        local.component.push_back(q.component[t]);
      }
    q = std::move(local);
  }
  const TileEngine engine(f);
  const std::vector<cplx> c = engine.tile_coefficients(q, f);
  CarlesonSequence a;
  double peak = 0.0;
  for (std::size_t t = 0; t < q.size(); ++t) {
    a[q.tiles[t].time] += std::norm(c[t]);
    peak = std::max(peak, a[q.tiles[t].time]);
  }
  // roundoff-level coefficients far from supp f carry no information
  for (auto it = a.begin(); it != a.end();) it = it->second <= 1e-12 * peak ? a.erase(it) : std::next(it);
  return a;
}

namespace {

/// Support of a together with every ancestor up to the coarsest support generation.
struct CarlesonTree {
  std::vector<DyadicInterval> nodes;  // sorted by (n, k)
  std::map<DyadicInterval, std::size_t> index;
  std::vector<double> a;
  std::vector<double> w;  // Σ_{J ⊆ L} |J| a_J
  std::vector<std::vector<std::size_t>> children;
  std::vector<std::size_t> roots;
  int top = 0;

  explicit CarlesonTree(const CarlesonSequence& seq) {
    std::set<DyadicInterval> all;
    int shift = -1;
    top = std::numeric_limits<int>::max();
    for (const auto& [i, v] : seq) {
      if (v < 0.0 || !std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "Carleson sequence must be finite and nonnegative");
      if (v == 0.0) continue;
      if (shift >= 0 && i.shift != shift) throw Error(ErrorCode::InvalidArgument, "Carleson sequence mixes grids");
      shift = i.shift;
      top = std::min(top, i.n);
    }
    for (const auto& [i, v] : seq) {
      if (v == 0.0) continue;
      DyadicInterval c = i;
      while (all.insert(c).second && c.n > top) c = c.parent();
    }
    nodes.assign(all.begin(), all.end());
    for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = i;
    a.assign(nodes.size(), 0.0);
    for (const auto& [i, v] : seq)
      if (v > 0.0) a[index[i]] += v;
    children.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].n == top) {
        roots.push_back(i);
        continue;
      }
      children[index[nodes[i].parent()]].push_back(i);
    }
    w.assign(nodes.size(), 0.0);
    // deeper generations first
    std::vector<std::size_t> order(nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return nodes[x].n > nodes[y].n; });
    for (std::size_t i : order) {
      w[i] += nodes[i].length() * a[i];
      if (nodes[i].n > top) w[index[nodes[i].parent()]] += w[i];
    }
  }

  void descendants(std::size_t i, std::vector<std::size_t>& out) const {
    for (std::size_t c : children[i]) {
      out.push_back(c);
      descendants(c, out);
    }
  }

  /// Greedy major collection: heaviest subtrees dropped first within |I|/4.
  std::vector<std::size_t> dropped(std::size_t i) const {
    std::vector<std::size_t> cand;
    descendants(i, cand);
    std::sort(cand.begin(), cand.end(), [&](std::size_t x, std::size_t y) {
      if (w[x] != w[y]) return w[x] > w[y];
      if (nodes[x].n != nodes[y].n) return nodes[x].n < nodes[y].n;
      return nodes[x].k < nodes[y].k;
    });
    std::vector<std::size_t> out;
    double used = 0.0;
    const double cap = nodes[i].length() / 4.0;
    for (std::size_t c : cand) {
      if (used + nodes[c].length() > cap * (1.0 + kTol)) continue;
      bool free_c = true;
      for (std::size_t d : out)
        if (!nodes[c].disjoint(nodes[d])) {
          free_c = false;
          break;
        }
      if (!free_c) continue;
      out.push_back(c);
      used += nodes[c].length();
    }
    std::sort(out.begin(), out.end(), [&](std::size_t x, std::size_t y) { return nodes[x] < nodes[y]; });
    return out;
  }
};

struct CarlesonNorm {
  double value = 0.0;
  std::vector<std::vector<std::size_t>> dropped;
  std::vector<double> avg;
};

CarlesonNorm carleson_norm_on(const CarlesonTree& tree, const SampledSignal& f, const OrliczSpace& x) {
  CarlesonNorm out;
  const std::vector<double> absf = f.abs();
  const std::size_t n = tree.nodes.size();
  out.dropped.resize(n);
  out.avg.resize(n);
  std::vector<double> ratio(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    out.dropped[i] = tree.dropped(i);
    double mass = tree.w[i];
    for (std::size_t d : out.dropped[i]) mass -= tree.w[d];
    out.avg[i] = local_average(absf, f.a(), f.b(), tree.nodes[i].as_interval(), x, Tail::Plus);
    const double den = out.avg[i] * out.avg[i];
    mass = std::max(mass, 0.0);
    ratio[i] = den > 0.0 ? mass / tree.nodes[i].length() / den : (mass > 0.0 ? kInf : 0.0);
  });
  for (double r : ratio) out.value = std::max(out.value, r);
  if (std::isinf(out.value))
    throw Error(ErrorCode::NotCarleson, "sequence has mass where the tailed average of f vanishes");
  return out;
}

}  // namespace

double generalized_carleson_norm(const CarlesonSequence& a, const SampledSignal& f, const OrliczSpace& x) {
  const CarlesonTree tree(a);
  return carleson_norm_on(tree, f, x).value;
}

CarlesonResult carleson_to_sparse(const CarlesonSequence& a, const SampledSignal& f, const OrliczSpace& x) {
  CarlesonResult res;
  const CarlesonTree tree(a);
  res.lhs.assign(f.size(), 0.0);
  res.rhs.assign(f.size(), 0.0);
  if (tree.nodes.empty()) {
    res.j.eta = 1.0;
    res.sharp.eta = 1.0;
    return res;
  }
  const CarlesonNorm norm = carleson_norm_on(tree, f, x);
  res.carleson_norm = norm.value;

  std::vector<std::size_t> stack(tree.roots.rbegin(), tree.roots.rend());
  std::vector<std::size_t> emitted;
  std::vector<std::vector<DyadicInterval>> emitted_children;
  while (!stack.empty()) {
    const std::size_t r = stack.back();
    stack.pop_back();
    const double avg2 = norm.avg[r] * norm.avg[r];
    const double unit = norm.value * avg2;
    const double thr = 24.0 * unit;
    const auto& drop = norm.dropped[r];
    std::set<std::size_t> drop_set(drop.begin(), drop.end());

    // walk 𝒢⋆(R) top-down accumulating Σ_{W ⊇ Z} a_W; stop at the first Z above threshold
    std::vector<std::size_t> selected;
    double worst = 0.0;
    std::vector<std::pair<std::size_t, double>> walk{{r, tree.a[r]}};
    while (!walk.empty()) {
      auto [z, acc] = walk.back();
      walk.pop_back();
      if (acc > thr && z != r) {
        selected.push_back(z);
        continue;
      }
      worst = std::max(worst, acc);
      for (std::size_t c : tree.children[z])
        if (!drop_set.count(c)) walk.push_back({c, acc + tree.a[c]});
    }
    std::vector<std::size_t> next = selected;
    double sel_mass = 0.0, total = 0.0;
    for (std::size_t z : selected) sel_mass += tree.nodes[z].length();
    total = sel_mass;
    for (std::size_t l : drop) {
      bool under = false;
      for (std::size_t z : selected)
        if (tree.nodes[z].contains(tree.nodes[l])) {
          under = true;
          break;
        }
      if (under) continue;
      next.push_back(l);
      total += tree.nodes[l].length();
    }
    std::sort(next.begin(), next.end(), [&](std::size_t p, std::size_t q) { return tree.nodes[p] < tree.nodes[q]; });
    const double len = tree.nodes[r].length();
    res.max_selection_budget = std::max(res.max_selection_budget, sel_mass / len);
    res.max_budget = std::max(res.max_budget, total / len);
    res.audit.push_back({node_label(tree.nodes[r]), total / len, unit > 0.0 ? worst / unit : 0.0});
    emitted.push_back(r);
    std::vector<DyadicInterval> kid_iv;
    for (std::size_t c : next) kid_iv.push_back(tree.nodes[c]);
    emitted_children.push_back(kid_iv);
    for (auto it = next.rbegin(); it != next.rend(); ++it) stack.push_back(*it);
  }

  for (std::size_t i = 0; i < tree.nodes.size(); ++i) add_indicator(res.lhs, f, tree.nodes[i].as_interval(), tree.a[i]);
  for (std::size_t e = 0; e < emitted.size(); ++e) {
    const std::size_t r = emitted[e];
    res.j.intervals.push_back(tree.nodes[r]);
    res.j.witnesses.push_back(free_part(tree.nodes[r], emitted_children[e]));
    add_indicator(res.rhs, f, tree.nodes[r].as_interval(), norm.value * norm.avg[r] * norm.avg[r]);
  }
  res.j.eta = 1.0 - res.max_budget;
  res.constant = domination_constant(res.lhs, res.rhs);

  res.sharp.intervals = sharp_recover(res.j.intervals, 2);
  res.sharp.eta = realized_eta(res.sharp.intervals, &res.sharp.witnesses);
  std::vector<double> sharp = sparse_operator_apply(res.sharp.intervals, f, x, 2.0, Tail::None);
  for (double& v : sharp) v = norm.value * v * v;
  res.constant_sharp = domination_constant(res.lhs, sharp);
  return res;
}

}  // namespace zlab
