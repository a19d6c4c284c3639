#include "rieszlab/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <unordered_set>

#include <Eigen/Dense>

#include "rieszlab/error.hpp"
#include "rieszlab/io.hpp"
#include "rieszlab/kernels.hpp"

namespace rieszlab {

namespace {

using Rng = std::mt19937_64;

// Pools at most this large are enumerated for polishing and exhaustive search.
constexpr std::size_t kPoolEnumLimit = 4096;

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

SetSpec as_set(const Component& c) {
  if (const auto* f = std::get_if<SelfSimilarSet>(&c)) return *f;
  return std::get<Segment>(c);
}

// One piece of the search domain: a fractal at a fixed depth, a segment grid,
// or a continuous segment.
struct Part {
  Host host = Host::Whole;
  const SelfSimilarSet* fractal = nullptr;
  const Segment* segment = nullptr;
  std::size_t depth = 0;
  std::size_t grid = 0;
  std::vector<Intrinsic> pool;  // filled when the part is discrete and small

  bool discrete() const { return fractal != nullptr || grid >= 2; }

  std::size_t capacity() const {
    if (fractal) return fractal->address_count(depth);
    if (grid >= 2) return grid;
    return std::numeric_limits<std::size_t>::max();
  }

  Vec realize(const Intrinsic& in) const {
    if (fractal) return fractal->realize(std::get<FractalAddress>(in));
    return segment->at(std::get<double>(in));
  }

  double grid_t(std::size_t k) const { return static_cast<double>(k) / static_cast<double>(grid - 1); }
  std::size_t grid_node(double t) const { return static_cast<std::size_t>(std::llround(t * static_cast<double>(grid - 1))); }

  // Occupancy key; empty for continuous segments.
  std::string key(const Intrinsic& in) const {
    std::string k(1, static_cast<char>(host));
    if (fractal) {
      const auto& w = std::get<FractalAddress>(in).word;
      k.append(w.begin(), w.end());
      return k;
    }
    if (grid >= 2) return k + std::to_string(grid_node(std::get<double>(in)));
    return {};
  }

  Intrinsic random(Rng& rng) const {
    if (fractal) {
      FractalAddress a;
      a.word.resize(depth);
      for (auto& sym : a.word) sym = static_cast<std::uint8_t>(uniform_index(rng, fractal->num_maps()));
      return a;
    }
    if (grid >= 2) return grid_t(uniform_index(rng, grid));
    return uniform01(rng);
  }

  void build_pool() {
    if (!discrete() || capacity() > kPoolEnumLimit) return;
    pool.clear();
    if (fractal) {
      const std::size_t K = fractal->num_maps();
      const std::size_t count = capacity();
      for (std::size_t idx = 0; idx < count; ++idx) {
        FractalAddress a;
        a.word.resize(depth);
        std::size_t v = idx;
        for (std::size_t pos = depth; pos-- > 0;) {
          a.word[pos] = static_cast<std::uint8_t>(v % K);
          v /= K;
        }
        pool.emplace_back(std::move(a));
      }
    } else {
      for (std::size_t k = 0; k < grid; ++k) pool.emplace_back(grid_t(k));
    }
  }
};

struct Domain {
  std::vector<Part> parts;
  std::size_t dim = 0;
  bool is_union = false;

  const Part& part(Host h) const {
    for (const auto& p : parts)
      if (p.host == h) return p;
    throw ValidationError(std::string("host '") + to_string(h) + "' does not belong to this set");
  }
  const Part* other(Host h) const {
    if (!is_union) return nullptr;
    return &part(h == Host::A1 ? Host::A2 : Host::A1);
  }
  std::size_t capacity() const {
    std::size_t c = 0;
    for (const auto& p : parts) {
      const std::size_t pc = p.capacity();
      if (pc == std::numeric_limits<std::size_t>::max() || c > std::numeric_limits<std::size_t>::max() - pc) {
        return std::numeric_limits<std::size_t>::max();
      }
      c += pc;
    }
    return c;
  }
};

Part make_part(const Component& comp, Host host, std::size_t n, std::size_t depth, std::size_t grid) {
  Part p;
  p.host = host;
  if (const auto* f = std::get_if<SelfSimilarSet>(&comp)) {
    p.fractal = f;
    p.depth = depth ? depth : auto_depth(*f, std::max<std::size_t>(n, 2));
  } else {
    p.segment = &std::get<Segment>(comp);
    p.grid = grid;
  }
  p.build_pool();
  return p;
}

Domain make_domain(const SetSpec& set, std::size_t n, std::size_t depth, std::size_t grid) {
  Domain d;
  d.dim = ambient_dim(set);
  if (const auto* u = std::get_if<UnionSet>(&set)) {
    d.is_union = true;
    d.parts.push_back(make_part(u->A1, Host::A1, n, depth, grid));
    d.parts.push_back(make_part(u->A2, Host::A2, n, depth, grid));
  } else if (const auto* f = std::get_if<SelfSimilarSet>(&set)) {
    Part p;
    p.host = Host::Whole;
    p.fractal = f;
    p.depth = depth ? depth : auto_depth(*f, std::max<std::size_t>(n, 2));
    p.build_pool();
    d.parts.push_back(std::move(p));
  } else {
    Part p;
    p.host = Host::Whole;
    p.segment = &std::get<Segment>(set);
    p.grid = grid;
    p.build_pool();
    d.parts.push_back(std::move(p));
  }
  return d;
}

void require_capacity(const Domain& dom, std::size_t n) {
  if (dom.capacity() >= n) return;
  std::ostringstream msg;
  msg << "cannot place " << n << " distinct points: only " << dom.capacity()
      << " candidate positions at this resolution; increase --depth (or the segment grid)";
  throw InfeasibleError(msg.str());
}

// Re-expresses a configuration on `dom`: fractal words are extended with the
// first map's symbol (which fixes the anchor) or truncated, grid parameters are
// snapped. Returns nullopt when the result is unusable.
std::optional<Configuration> adapt(const Domain& dom, const Configuration& in) {
  if (in.dim() != dom.dim) return std::nullopt;
  Configuration out(dom.dim);
  std::unordered_set<std::string> seen;
  try {
    for (std::size_t i = 0; i < in.size(); ++i) {
      const Part& p = dom.part(in.host(i));
      Intrinsic intr = in.intrinsic(i);
      if (p.fractal) {
        auto* a = std::get_if<FractalAddress>(&intr);
        if (!a) return std::nullopt;
        for (auto sym : a->word)
          if (sym >= p.fractal->num_maps()) return std::nullopt;
        a->word.resize(p.depth, 0);
      } else {
        auto* t = std::get_if<double>(&intr);
        if (!t || !(*t >= 0.0 && *t <= 1.0)) return std::nullopt;
        if (p.grid >= 2) *t = p.grid_t(p.grid_node(*t));
      }
      const std::string k = p.key(intr);
      if (!k.empty() && !seen.insert(k).second) return std::nullopt;
      const Vec x = p.realize(intr);
      out.push_back(x, p.host, std::move(intr));
    }
  } catch (const Error&) {
    return std::nullopt;
  }
  return out;
}

Configuration random_configuration(const Domain& dom, std::size_t n, Rng& rng) {
  Configuration cfg(dom.dim);
  std::unordered_set<std::string> occ;
  for (std::size_t i = 0; i < n; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
      const Part& p = dom.parts[uniform_index(rng, dom.parts.size())];
      Intrinsic in = p.random(rng);
      const std::string k = p.key(in);
      if (!k.empty() && !occ.insert(k).second) continue;
      const Vec x = p.realize(in);
      cfg.push_back(x, p.host, std::move(in));
      placed = true;
    }
    if (placed) continue;
    // Dense pools: take the first free candidate.
    for (const auto& p : dom.parts) {
      for (const auto& in : p.pool) {
        const std::string k = p.key(in);
        if (occ.insert(k).second) {
          cfg.push_back(p.realize(in), p.host, in);
          placed = true;
          break;
        }
      }
      if (placed) break;
    }
    if (!placed) throw InfeasibleError("could not draw distinct starting points; increase the resolution");
  }
  return cfg;
}

double exact_energy(const Configuration& cfg, double s) {
  if (cfg.size() < 2) return 0.0;
  EvalOptions serial;
  serial.parallel = false;
  return riesz_energy(cfg, s, serial).total;
}

// Metropolis search over one configuration followed by greedy polishing.
class Annealer {
 public:
  Annealer(const Domain& dom, double s, const SearchParams& params, std::uint64_t seed)
      : dom_(dom), s_(s), params_(params), rng_(seed) {}

  Configuration run(Configuration start) {
    cfg_ = std::move(start);
    rebuild_occupancy();
    energy_ = exact_energy(cfg_, s_);
    best_ = cfg_;
    best_energy_ = energy_;
    const std::size_t n = cfg_.size();
    if (n >= 2) {
      double T = params_.initial_temperature > 0.0 ? params_.initial_temperature : 0.1 * energy_ / static_cast<double>(n);
      const std::size_t steps = params_.steps_per_point * n;
      for (std::size_t level = 0; level < params_.levels; ++level) {
        for (std::size_t step = 0; step < steps; ++step) {
          if (propose(uniform_index(rng_, n), T) && energy_ < best_energy_) {
            best_ = cfg_;
            best_energy_ = energy_;
          }
        }
        energy_ = exact_energy(cfg_, s_);
        T *= params_.cooling;
      }
      cfg_ = best_;
      rebuild_occupancy();
      energy_ = exact_energy(cfg_, s_);
      polish();
    }
    return cfg_;
  }

  /// Greedy descent only.
  Configuration descend(Configuration start) {
    cfg_ = std::move(start);
    rebuild_occupancy();
    energy_ = exact_energy(cfg_, s_);
    if (cfg_.size() >= 2) polish();
    return cfg_;
  }

  std::size_t evaluations() const noexcept { return evaluations_; }

 private:
  void rebuild_occupancy() {
    occ_.clear();
    for (std::size_t i = 0; i < cfg_.size(); ++i) {
      const std::string k = dom_.part(cfg_.host(i)).key(cfg_.intrinsic(i));
      if (!k.empty()) occ_.insert(k);
    }
  }

  double potential(std::span<const double> x, std::size_t skip) {
    ++evaluations_;
    return kernels::serial::potential_at(cfg_.coords(), cfg_.dim(), x, skip, s_);
  }

  void apply(std::size_t j, const Part& target, Intrinsic in, const Vec& x, double dE) {
    const std::string old_key = dom_.part(cfg_.host(j)).key(cfg_.intrinsic(j));
    if (!old_key.empty()) occ_.erase(old_key);
    const std::string new_key = target.key(in);
    if (!new_key.empty()) occ_.insert(new_key);
    cfg_.set(j, x, target.host, std::move(in));
    energy_ += dE;
  }

  // Energy change of moving point j to (target, in); +inf when infeasible.
  double delta(std::size_t j, const Part& target, const Intrinsic& in, Vec& x_out) {
    const std::string k = target.key(in);
    if (!k.empty() && occ_.count(k)) return std::numeric_limits<double>::infinity();
    x_out = target.realize(in);
    const double u_new = potential(x_out, j);
    if (!std::isfinite(u_new)) return std::numeric_limits<double>::infinity();
    const double u_old = potential(cfg_.point(j), j);
    return 2.0 * (u_new - u_old);
  }

  bool propose(std::size_t j, double T) {
    const Part& here = dom_.part(cfg_.host(j));
    const Part* target = &here;
    Intrinsic in;
    if (dom_.is_union && uniform01(rng_) < params_.cross_probability) {
      target = dom_.other(cfg_.host(j));
      in = target->random(rng_);
    } else if (here.fractal) {
      if (uniform01(rng_) < params_.escape_probability) {
        in = here.random(rng_);
      } else {
        FractalAddress a = std::get<FractalAddress>(cfg_.intrinsic(j));
        if (a.word.empty()) return false;
        const std::size_t pos = uniform_index(rng_, a.word.size());
        const std::size_t K = here.fractal->num_maps();
        a.word[pos] = static_cast<std::uint8_t>((a.word[pos] + 1 + uniform_index(rng_, K - 1)) % K);
        in = std::move(a);
      }
    } else if (here.grid >= 2) {
      if (uniform01(rng_) < params_.escape_probability) {
        in = here.random(rng_);
      } else {
        const std::size_t node = here.grid_node(std::get<double>(cfg_.intrinsic(j)));
        const bool up = uniform01(rng_) < 0.5;
        std::size_t next = up ? node + 1 : (node == 0 ? 1 : node - 1);
        if (next >= here.grid) next = node - 1;
        in = here.grid_t(next);
      }
    } else {
      return gradient_step(j);
    }
    Vec x;
    const double dE = delta(j, *target, in, x);
    if (!std::isfinite(dE)) return false;
    if (dE <= 0.0 || uniform01(rng_) < std::exp(-dE / T)) {
      apply(j, *target, std::move(in), x, dE);
      return true;
    }
    return false;
  }

  // Projected descent step along the segment for a continuous segment point,
  // with backtracking. Returns true when the energy decreased.
  bool gradient_step(std::size_t j) {
    const Part& part = dom_.part(cfg_.host(j));
    const Segment& seg = *part.segment;
    const double t = std::get<double>(cfg_.intrinsic(j));
    const Vec dir = seg.direction();
    const auto xj = cfg_.point(j);
    const std::size_t dim = cfg_.dim();

    double vv = 0.0;
    for (std::size_t k = 0; k < dim; ++k) vv += dir[k] * dir[k];
    double g = 0.0, h = 0.0;
    for (std::size_t i = 0; i < cfg_.size(); ++i) {
      if (i == j) continue;
      const auto xi = cfg_.point(i);
      double r2 = 0.0, proj = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double diff = xj[k] - xi[k];
        r2 += diff * diff;
        proj += diff * dir[k];
      }
      const double c1 = s_ * kernels::riesz_from_sq(r2, s_) / r2;
      g -= c1 * proj;
      h += c1 * ((s_ + 2.0) * proj * proj / r2 - vv);
    }
    g *= 2.0;
    h *= 2.0;
    if (g == 0.0 || !std::isfinite(g)) return false;

    const double sign = g > 0.0 ? -1.0 : 1.0;
    double bound = sign > 0.0 ? 1.0 - t : t;
    bool to_boundary = true;
    for (std::size_t i = 0; i < cfg_.size(); ++i) {
      if (i == j || cfg_.host(i) != cfg_.host(j)) continue;
      const auto* ti = std::get_if<double>(&cfg_.intrinsic(i));
      if (!ti) continue;
      const double ahead = (*ti - t) * sign;
      if (ahead > 0.0 && 0.5 * ahead < bound) {
        bound = 0.5 * ahead;
        to_boundary = false;
      }
    }
    if (!(bound > 0.0)) return false;

    const double u_old = potential(xj, j);
    // Start from the 1D Newton step when the energy is locally convex.
    const bool newton = h > 0.0 && std::abs(g) / h < bound;
    double step = newton ? std::abs(g) / h : bound;
    for (int k = 0; k < 60; ++k) {
      double t_new = t + sign * step;
      if (k == 0 && to_boundary && !newton) t_new = sign > 0.0 ? 1.0 : 0.0;
      t_new = std::clamp(t_new, 0.0, 1.0);
      if (t_new == t) return false;
      Vec x = seg.at(t_new);
      const double dE = 2.0 * (potential(x, j) - u_old);
      if (dE <= -1e-4 * std::abs(g) * std::abs(t_new - t)) {
        apply(j, part, t_new, x, dE);
        return true;
      }
      step *= 0.5;
    }
    return false;
  }

  // Best single-point relocation of j over enumerated candidates.
  bool relocate(std::size_t j) {
    const Part& here = dom_.part(cfg_.host(j));
    const double u_old = potential(cfg_.point(j), j);
    const double threshold = -1e-14 * std::max(std::abs(energy_), 1e-300);
    double best_dE = threshold;
    const Part* best_part = nullptr;
    Intrinsic best_in;
    Vec best_x;

    auto consider = [&](const Part& p, const Intrinsic& in) {
      const std::string k = p.key(in);
      if (!k.empty() && occ_.count(k)) return;
      Vec x = p.realize(in);
      const double u = potential(x, j);
      if (!std::isfinite(u)) return;
      const double dE = 2.0 * (u - u_old);
      if (dE < best_dE) {
        best_dE = dE;
        best_part = &p;
        best_in = in;
        best_x = std::move(x);
      }
    };

    auto scan = [&](const Part& p) {
      if (!p.pool.empty()) {
        for (const auto& in : p.pool) consider(p, in);
      } else if (p.fractal && &p == &here) {
        const auto& a = std::get<FractalAddress>(cfg_.intrinsic(j));
        for (std::size_t pos = 0; pos < a.word.size(); ++pos) {
          for (std::size_t sym = 0; sym < p.fractal->num_maps(); ++sym) {
            if (sym == a.word[pos]) continue;
            FractalAddress b = a;
            b.word[pos] = static_cast<std::uint8_t>(sym);
            consider(p, b);
          }
        }
      }
    };

    scan(here);
    if (const Part* o = dom_.other(cfg_.host(j)); o && o->discrete()) scan(*o);
    if (!best_part) return false;
    apply(j, *best_part, std::move(best_in), best_x, best_dE);
    return true;
  }

  // Projected Newton on the parameters of all continuous-segment points at
  // once, every other point held fixed. Endpoints pushing outward form the
  // active set; an indefinite Hessian is shifted until it factors. Steps that
  // reorder points along a segment are shortened, since reaching the new order
  // would have to pass through a coincidence.
  bool newton_polish() {
    std::vector<std::size_t> idx;
    std::vector<std::ptrdiff_t> slot(cfg_.size(), -1);
    for (std::size_t j = 0; j < cfg_.size(); ++j) {
      const Part& p = dom_.part(cfg_.host(j));
      if (!p.discrete() && p.segment) {
        slot[j] = static_cast<std::ptrdiff_t>(idx.size());
        idx.push_back(j);
      }
    }
    if (idx.empty()) return false;
    const std::size_t m = idx.size(), n = cfg_.size(), dim = cfg_.dim();
    std::vector<Vec> dir(m);
    for (std::size_t a = 0; a < m; ++a) dir[a] = dom_.part(cfg_.host(idx[a])).segment->direction();

    const double start = energy_;
    Eigen::VectorXd g(m);
    Eigen::MatrixXd H(m, m);
    Vec d(dim), hv(dim);
    for (int iter = 0; iter < 200; ++iter) {
      g.setZero();
      H.setZero();
      for (std::size_t a = 0; a < m; ++a) {
        const auto xa = cfg_.point(idx[a]);
        const Vec& va = dir[a];
        for (std::size_t i = 0; i < n; ++i) {
          if (i == idx[a]) continue;
          const auto xi = cfg_.point(i);
          double r2 = 0.0, dv = 0.0;
          for (std::size_t k = 0; k < dim; ++k) {
            d[k] = xa[k] - xi[k];
            r2 += d[k] * d[k];
            dv += d[k] * va[k];
          }
          const double f = kernels::riesz_from_sq(r2, s_);
          const double c1 = s_ * f / r2;                    // s r^{-s-2}
          const double c2 = s_ * (s_ + 2.0) * f / (r2 * r2);  // s(s+2) r^{-s-4}
          g[static_cast<Eigen::Index>(a)] += -2.0 * c1 * dv;
          double vv = 0.0;
          for (std::size_t k = 0; k < dim; ++k) vv += va[k] * va[k];
          H(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) += 2.0 * (c2 * dv * dv - c1 * vv);
          if (slot[i] >= 0) {
            const Vec& vb = dir[static_cast<std::size_t>(slot[i])];
            double db = 0.0, ab = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
              db += d[k] * vb[k];
              ab += va[k] * vb[k];
            }
            H(static_cast<Eigen::Index>(a), slot[i]) += -2.0 * (c2 * dv * db - c1 * ab);
          }
        }
      }

      std::vector<Eigen::Index> free;
      for (std::size_t a = 0; a < m; ++a) {
        const double t = std::get<double>(cfg_.intrinsic(idx[a]));
        const double ga = g[static_cast<Eigen::Index>(a)];
        if ((t <= 0.0 && ga > 0.0) || (t >= 1.0 && ga < 0.0)) continue;
        free.push_back(static_cast<Eigen::Index>(a));
      }
      if (free.empty()) break;
      const auto F = static_cast<Eigen::Index>(free.size());
      Eigen::MatrixXd HF(F, F);
      Eigen::VectorXd gF(F);
      for (Eigen::Index u = 0; u < F; ++u) {
        gF[u] = g[free[u]];
        for (Eigen::Index w = 0; w < F; ++w) HF(u, w) = H(free[u], free[w]);
      }
      const double scale = std::max(HF.diagonal().cwiseAbs().maxCoeff(), 1e-300);
      Eigen::VectorXd step;
      for (double shift = 0.0;; shift = shift == 0.0 ? 1e-10 * scale : 10.0 * shift) {
        Eigen::LLT<Eigen::MatrixXd> llt(HF + shift * Eigen::MatrixXd::Identity(F, F));
        if (llt.info() == Eigen::Success) {
          step = -llt.solve(gF);
          break;
        }
        if (shift > 1e12 * scale) return energy_ < start;
      }
      const double slope = gF.dot(step);
      if (!(slope < 0.0)) break;

      // Backtracking on the exact energy.
      const Configuration saved = cfg_;
      const double e0 = energy_;
      bool accepted = false;
      for (double alpha = 1.0; alpha > 1e-12; alpha *= 0.5) {
        for (Eigen::Index u = 0; u < F; ++u) {
          const std::size_t j = idx[static_cast<std::size_t>(free[u])];
          const double t0 = std::get<double>(saved.intrinsic(j));
          const double t1 = std::clamp(t0 + alpha * step[u], 0.0, 1.0);
          cfg_.set(j, dom_.part(cfg_.host(j)).segment->at(t1), cfg_.host(j), t1);
        }
        if (!same_order(saved, idx)) {
          cfg_ = saved;
          continue;
        }
        double e1;
        try {
          e1 = exact_energy(cfg_, s_);
        } catch (const InfiniteEnergyError&) {
          cfg_ = saved;
          continue;
        }
        ++evaluations_;
        if (e1 <= e0 + 1e-4 * alpha * slope) {
          energy_ = e1;
          accepted = true;
          break;
        }
        cfg_ = saved;
      }
      if (!accepted) {
        energy_ = e0;
        break;
      }
      if (e0 - energy_ <= 1e-15 * std::abs(e0)) break;
    }
    return energy_ < start * (1.0 - 1e-14);
  }

  // True when the points of each segment keep their order along it.
  bool same_order(const Configuration& before, const std::vector<std::size_t>& idx) const {
    std::vector<std::pair<double, std::size_t>> order;
    for (Host h : {Host::Whole, Host::A1, Host::A2}) {
      order.clear();
      for (auto j : idx)
        if (before.host(j) == h) order.emplace_back(std::get<double>(before.intrinsic(j)), j);
      std::sort(order.begin(), order.end());
      for (std::size_t k = 1; k < order.size(); ++k) {
        if (!(std::get<double>(cfg_.intrinsic(order[k - 1].second)) < std::get<double>(cfg_.intrinsic(order[k].second)))) {
          return false;
        }
      }
    }
    return true;
  }

  void polish() {
    for (int pass = 0; pass < 1000; ++pass) {
      bool improved = newton_polish();
      for (std::size_t j = 0; j < cfg_.size(); ++j) {
        const Part& here = dom_.part(cfg_.host(j));
        if (here.discrete()) {
          improved |= relocate(j);
        } else if (!improved) {
          for (int it = 0; it < 20 && gradient_step(j); ++it) improved = true;
        }
      }
      energy_ = exact_energy(cfg_, s_);
      if (!improved) break;
    }
  }

  const Domain& dom_;
  double s_;
  const SearchParams& params_;
  Rng rng_;
  Configuration cfg_;
  double energy_ = 0.0;
  Configuration best_;
  double best_energy_ = 0.0;
  std::unordered_set<std::string> occ_;
  std::size_t evaluations_ = 0;
};

struct Candidate {
  Configuration config;
  double energy;
};

std::size_t a1_count(const Configuration& cfg, bool is_union) {
  return is_union ? cfg.count(Host::A1) : cfg.size();
}

// Best candidate (first on exact ties) and the tie-tolerant minimal A1 count.
SolveResult finalize(std::vector<Candidate>& cands, double s, bool is_union, double tie_tol, SolveStatus status,
                     const EvalOptions& eval) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < cands.size(); ++i)
    if (cands[i].energy < cands[best].energy) best = i;
  const double best_e = cands[best].energy;
  std::size_t n1 = a1_count(cands[best].config, is_union);
  for (const auto& c : cands) {
    if (c.energy <= best_e + tie_tol * std::abs(best_e)) n1 = std::min(n1, a1_count(c.config, is_union));
  }
  SolveResult r;
  r.config = std::move(cands[best].config);
  r.energy = riesz_energy(r.config, s, eval);
  r.N1 = n1;
  r.N2 = r.config.size() - n1;
  r.status = status;
  return r;
}

SolveResult trivial_result(const Domain& dom, std::size_t n, bool is_union) {
  SolveResult r;
  r.config = Configuration(dom.dim);
  if (n == 1) {
    const Part& p = dom.parts.front();
    Intrinsic in = p.fractal ? Intrinsic(FractalAddress{std::vector<std::uint8_t>(p.depth, 0)}) : Intrinsic(0.0);
    r.config.push_back(p.realize(in), p.host, in);
  }
  r.energy.per_point.assign(n, 0.0);
  r.energy.min_dist = std::numeric_limits<double>::infinity();
  r.N1 = a1_count(r.config, is_union);
  r.N2 = n - r.N1;
  r.status = SolveStatus::OracleExact;
  return r;
}

// ---------------------------------------------------------------------------
// exhaustive enumeration

struct Pool {
  std::vector<Part> parts_storage;
  std::size_t dim = 0;
  std::vector<Vec> points;
  std::vector<Host> hosts;
  std::vector<Intrinsic> intr;
};

Pool build_exhaustive_pool(const SetSpec& set, const ExhaustiveOptions& opts, std::size_t n) {
  if (opts.depth == 0) throw ValidationError("exhaustive depth must be >= 1");
  if (opts.segment_grid < 2) throw ValidationError("exhaustive segment grid needs >= 2 nodes");
  Domain dom = make_domain(set, n, opts.depth, opts.segment_grid);
  Pool pool;
  pool.dim = dom.dim;
  for (const auto& p : dom.parts) {
    if (p.pool.empty()) {
      std::ostringstream msg;
      msg << "exhaustive pool too large: component has " << p.capacity() << " candidates (limit " << kPoolEnumLimit << ")";
      throw InfeasibleError(msg.str());
    }
    for (const auto& in : p.pool) {
      pool.points.push_back(p.realize(in));
      pool.hosts.push_back(p.host);
      pool.intr.push_back(in);
    }
  }
  return pool;
}

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(c);
}

void check_subset_count(std::size_t pool, std::size_t n, std::uint64_t limit) {
  if (n > pool) {
    std::ostringstream msg;
    msg << "exhaustive search refused: N=" << n << " exceeds the candidate pool of " << pool << " points";
    throw InfeasibleError(msg.str());
  }
  const double c = binomial(pool, n);
  if (c > static_cast<double>(limit)) {
    std::ostringstream msg;
    msg << "exhaustive search refused: C(" << pool << "," << n << ") = " << c << " subsets exceeds the limit of "
        << limit;
    throw InfeasibleError(msg.str());
  }
}

Configuration subset_config(const Pool& pool, const std::vector<std::size_t>& idx) {
  Configuration cfg(pool.dim);
  for (auto i : idx) cfg.push_back(pool.points[i], pool.hosts[i], pool.intr[i]);
  return cfg;
}

struct SubtreeBest {
  double energy = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> idx;
  std::size_t n1 = std::numeric_limits<std::size_t>::max();
  std::size_t visited = 0;
};

// All n-subsets whose smallest index is `first`, in lexicographic order. In
// the second pass (cutoff finite), tracks the minimal A1 count among subsets
// with energy <= cutoff instead of the minimum energy.
SubtreeBest enumerate_from(const std::vector<double>& W, const std::vector<unsigned char>& is_a1, std::size_t P,
                           std::size_t n, std::size_t first, double cutoff) {
  SubtreeBest out;
  std::vector<std::size_t> idx(n);
  std::vector<double> partial(n);
  std::vector<std::size_t> a1(n);
  idx[0] = first;
  partial[0] = 0.0;
  a1[0] = is_a1[first];
  if (n == 1) {
    out.energy = 0.0;
    out.idx = idx;
    out.n1 = a1[0];
    out.visited = 1;
    return out;
  }
  std::size_t depth = 1;
  idx[1] = first;
  while (depth >= 1) {
    ++idx[depth];
    if (idx[depth] > P - (n - depth)) {
      --depth;
      continue;
    }
    const std::size_t e = idx[depth];
    double add = 0.0;
    for (std::size_t k = 0; k < depth; ++k) add += W[idx[k] * P + e];
    partial[depth] = partial[depth - 1] + add;
    a1[depth] = a1[depth - 1] + is_a1[e];
    if (depth + 1 == n) {
      ++out.visited;
      const double energy = partial[depth];
      if (std::isinf(cutoff)) {
        if (energy < out.energy) {
          out.energy = energy;
          out.idx = idx;
        }
      } else if (energy <= cutoff && a1[depth] < out.n1) {
        out.n1 = a1[depth];
        out.energy = energy;
        out.idx = idx;
      }
    } else {
      idx[depth + 1] = idx[depth];
      ++depth;
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

void SearchParams::validate() const {
  if (restarts < 1) throw ValidationError("restarts must be >= 1");
  if (!(cooling > 0.0 && cooling < 1.0)) throw ValidationError("cooling factor must lie in (0,1)");
  if (levels < 1 || steps_per_point < 1) throw ValidationError("annealing needs >= 1 level and >= 1 step per point");
  if (!(tie_tol >= 0.0)) throw ValidationError("tie_tol must be non-negative");
  if (segment_grid == 1) throw ValidationError("segment grid needs >= 2 nodes (or 0 for continuous)");
  if (!(escape_probability >= 0.0 && escape_probability <= 1.0) ||
      !(cross_probability >= 0.0 && cross_probability <= 1.0)) {
    throw ValidationError("move probabilities must lie in [0,1]");
  }
}

const char* to_string(SolveStatus status) {
  return status == SolveStatus::OracleExact ? "oracle-exact" : "heuristic";
}

SolveStatus parse_status(const std::string& text) {
  if (text == "oracle-exact") return SolveStatus::OracleExact;
  if (text == "heuristic") return SolveStatus::Heuristic;
  throw ValidationError("unknown solve status '" + text + "'");
}

std::size_t auto_depth(const SelfSimilarSet& fractal, std::size_t n) {
  const double target = std::log(4.0) + std::log(static_cast<double>(std::max<std::size_t>(n, 1))) / fractal.dimension();
  const double levels = target / std::log(1.0 / fractal.ratio());
  std::size_t m = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(levels - 1e-9)));
  while (fractal.address_count(m) < n) ++m;
  return m;
}

SolveResult minimize_exhaustive(const SetSpec& set, std::size_t n, double s, const ExhaustiveOptions& opts) {
  const Pool pool = build_exhaustive_pool(set, opts, n);
  const std::size_t P = pool.points.size();
  check_subset_count(P, n, opts.max_subsets);
  const bool is_union = std::holds_alternative<UnionSet>(set);

  if (n <= 1) {
    SolveResult r;
    r.config = n == 1 ? subset_config(pool, {0}) : Configuration(pool.dim);
    r.energy.per_point.assign(n, 0.0);
    r.energy.min_dist = std::numeric_limits<double>::infinity();
    r.N1 = a1_count(r.config, is_union);
    r.N2 = n - r.N1;
    r.status = SolveStatus::OracleExact;
    r.evaluations = P;
    r.depth = opts.depth;
    return r;
  }

  std::vector<double> W(P * P, 0.0);
  for (std::size_t a = 0; a < P; ++a)
    for (std::size_t b = 0; b < P; ++b)
      if (a != b) W[a * P + b] = 2.0 * kernels::riesz_from_sq(distance_sq(pool.points[a], pool.points[b]), s);
  std::vector<unsigned char> is_a1(P);
  for (std::size_t i = 0; i < P; ++i) is_a1[i] = pool.hosts[i] == Host::A1 ? 1 : 0;

  const std::size_t firsts = P - n + 1;
  auto run_pass = [&](double cutoff) {
    std::vector<SubtreeBest> parts(firsts);
    const auto F = static_cast<std::ptrdiff_t>(firsts);
#pragma omp parallel for schedule(dynamic) if (opts.parallel)
    for (std::ptrdiff_t f = 0; f < F; ++f) {
      parts[static_cast<std::size_t>(f)] = enumerate_from(W, is_a1, P, n, static_cast<std::size_t>(f), cutoff);
    }
    return parts;
  };

  auto first_pass = run_pass(std::numeric_limits<double>::infinity());
  SubtreeBest best;
  std::size_t visited = 0;
  for (auto& p : first_pass) {
    visited += p.visited;
    if (p.energy < best.energy) best = std::move(p);
  }

  std::vector<std::size_t> chosen = best.idx;
  std::size_t n1 = 0;
  for (auto i : chosen) n1 += is_a1[i];
  if (is_union) {
    const double cutoff = best.energy + opts.tie_tol * std::abs(best.energy);
    for (const auto& p : run_pass(cutoff)) n1 = std::min(n1, p.n1);
  } else {
    n1 = n;
  }

  SolveResult r;
  r.config = subset_config(pool, chosen);
  r.energy = riesz_energy(r.config, s);
  r.N1 = n1;
  r.N2 = n - n1;
  r.status = SolveStatus::OracleExact;
  r.evaluations = visited;
  r.depth = opts.depth;
  return r;
}

SolveResult minimize_exhaustive_reference(const SetSpec& set, std::size_t n, double s, const ExhaustiveOptions& opts) {
  const Pool pool = build_exhaustive_pool(set, opts, n);
  const std::size_t P = pool.points.size();
  check_subset_count(P, n, opts.max_subsets);
  const bool is_union = std::holds_alternative<UnionSet>(set);
  EvalOptions serial;
  serial.parallel = false;

  std::vector<Candidate> all;
  std::vector<bool> mask(P, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(n), true);
  std::size_t visited = 0;
  do {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < P; ++i)
      if (mask[i]) idx.push_back(i);
    Configuration cfg = subset_config(pool, idx);
    const double e = n >= 2 ? riesz_energy(cfg, s, serial).total : 0.0;
    all.push_back({std::move(cfg), e});
    ++visited;
  } while (std::prev_permutation(mask.begin(), mask.end()));

  SolveResult r = n >= 2 ? finalize(all, s, is_union, opts.tie_tol, SolveStatus::OracleExact, serial)
                         : SolveResult{all.front().config, {}, 0, 0, SolveStatus::OracleExact, 0, 0};
  if (n < 2) {
    r.energy.per_point.assign(n, 0.0);
    r.energy.min_dist = std::numeric_limits<double>::infinity();
    r.N1 = a1_count(r.config, is_union);
    r.N2 = n - r.N1;
  }
  r.evaluations = visited;
  r.depth = opts.depth;
  return r;
}

SolveResult minimize_local_search(const SetSpec& set, std::size_t n, double s, const SearchParams& params,
                                  const Configuration* warm_start) {
  params.validate();
  const Domain dom = make_domain(set, n, params.depth, params.segment_grid);
  const bool is_union = dom.is_union;
  require_capacity(dom, n);
  const std::size_t depth = dom.parts.front().fractal ? dom.parts.front().depth
                            : dom.parts.size() > 1   ? dom.parts.back().depth
                                                     : 0;
  if (n < 2) {
    SolveResult r = trivial_result(dom, n, is_union);
    r.depth = depth;
    return r;
  }

  std::optional<Configuration> warm;
  if (warm_start && warm_start->size() == n) warm = adapt(dom, *warm_start);

  const std::size_t R = params.restarts;
  std::vector<Candidate> results(R);
  std::vector<std::size_t> evals(R, 0);
  std::vector<std::exception_ptr> errors(R);
  const auto Ri = static_cast<std::ptrdiff_t>(R);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < Ri; ++r) {
    const auto ri = static_cast<std::size_t>(r);
    try {
      Rng rng(params.seed + ri);
      Configuration start = (ri == 0 && warm) ? *warm : random_configuration(dom, n, rng);
      Annealer annealer(dom, s, params, params.seed + ri + 0x9e3779b97f4a7c15ULL);
      Configuration best = annealer.run(std::move(start));
      const double e = exact_energy(best, s);
      results[ri] = Candidate{std::move(best), e};
      evals[ri] = annealer.evaluations();
    } catch (...) {
      errors[ri] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  SolveResult out = finalize(results, s, is_union, params.tie_tol, SolveStatus::Heuristic, params.eval);
  for (auto e : evals) out.evaluations += e;
  out.depth = depth;
  return out;
}

std::vector<std::size_t> split_window(std::size_t n, std::optional<double> center_fraction, bool have_prediction) {
  std::vector<std::size_t> out;
  if (!have_prediction && n <= 24) {
    for (std::size_t m = 0; m <= n; ++m) out.push_back(m);
    return out;
  }
  const double frac = center_fraction ? std::clamp(*center_fraction, 0.0, 1.0) : 0.5;
  const auto center = static_cast<long long>(std::llround(frac * static_cast<double>(n)));
  const auto half = static_cast<long long>(std::max(3.0, std::ceil(0.15 * static_cast<double>(n))));
  const long long lo = std::max(0LL, center - half);
  const long long hi = std::min(static_cast<long long>(n), center + half);
  for (long long m = lo; m <= hi; ++m) out.push_back(static_cast<std::size_t>(m));
  return out;
}

namespace {

// Minimal-energy configuration of M points on one component, relabeled to
// `host`. Uses the cache when it already holds a value from this process.
Configuration solve_part(const Component& comp, Host host, std::size_t m, double s, const SearchParams& params,
                         Cache* cache, std::map<std::size_t, Configuration>& memo) {
  if (auto it = memo.find(m); it != memo.end()) return it->second;
  const SetSpec part_set = as_set(comp);
  Configuration whole;
  if (m < 2) {
    SearchParams p = params;
    const Domain dom = make_domain(part_set, std::max<std::size_t>(m, 1), p.depth, p.segment_grid);
    whole = trivial_result(dom, m, false).config;
  } else {
    const std::string hash = set_hash(comp);
    std::optional<CacheEntry> cached = cache ? cache->get(hash, s, m) : std::nullopt;
    if (cached && cache->fresh(hash, s, m)) {
      whole = cached->config;
    } else {
      SearchParams p = params;
      p.seed = params.seed + 7919 * m + (host == Host::A2 ? 104729 : 0);
      SolveResult r = minimize_local_search(part_set, m, s, p, cached ? &cached->config : nullptr);
      if (cached && cached->energy < r.energy.total) {
        whole = cached->config;
        cache->mark_fresh(hash, s, m);
      } else {
        whole = r.config;
        if (cache) cache->put(hash, s, m, r.energy.total, r.config, to_string(r.status));
      }
    }
  }
  Configuration relabeled(whole.dim());
  for (std::size_t i = 0; i < whole.size(); ++i) relabeled.push_back(whole.point(i), host, whole.intrinsic(i));
  memo.emplace(m, relabeled);
  return relabeled;
}

Configuration assemble(const Configuration& a, const Configuration& b) {
  Configuration out(std::max(a.dim(), b.dim()));
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a.point(i), a.host(i), a.intrinsic(i));
  for (std::size_t i = 0; i < b.size(); ++i) out.push_back(b.point(i), b.host(i), b.intrinsic(i));
  return out;
}

}  // namespace

SolveResult minimize_union(const UnionSet& set, std::size_t n, double s, const SearchParams& params,
                           const UnionSolveContext& ctx) {
  params.validate();
  const SetSpec whole = set;
  const Domain dom = make_domain(whole, n, params.depth, params.segment_grid);
  require_capacity(dom, n);
  const std::size_t depth = dom.parts.front().fractal ? dom.parts.front().depth : dom.parts.back().depth;
  if (n < 2) {
    SolveResult r = trivial_result(dom, n, true);
    r.depth = depth;
    return r;
  }

  std::optional<Configuration> warm;
  if (ctx.warm_start && ctx.warm_start->size() == n) warm = adapt(dom, *ctx.warm_start);

  std::optional<double> center = ctx.alpha_hint;
  if (!center && warm) center = static_cast<double>(warm->count(Host::A1)) / static_cast<double>(n);
  const auto window = split_window(n, center, ctx.alpha_hint.has_value());

  std::map<std::size_t, Configuration> memo1, memo2;
  std::vector<Candidate> assembled;
  std::vector<bool> done(n + 1, false);
  auto add_split = [&](std::size_t m1) {
    if (done[m1]) return;
    const std::size_t m2 = n - m1;
    if (dom.parts[0].capacity() < m1 || dom.parts[1].capacity() < m2) return;
    Configuration a = solve_part(set.A1, Host::A1, m1, s, params, ctx.cache, memo1);
    Configuration b = solve_part(set.A2, Host::A2, m2, s, params, ctx.cache, memo2);
    auto cfg = adapt(dom, assemble(a, b));
    if (!cfg) return;
    done[m1] = true;
    const double e = exact_energy(*cfg, s);
    assembled.push_back({std::move(*cfg), e});
  };
  for (auto m1 : window) add_split(m1);

  // Splits outside the window whose parts are already known.
  if (ctx.cache) {
    const std::string h1 = set_hash(set.A1), h2 = set_hash(set.A2);
    for (std::size_t m1 = 0; m1 <= n; ++m1) {
      if (done[m1]) continue;
      const std::size_t m2 = n - m1;
      const bool have1 = m1 < 2 || ctx.cache->get(h1, s, m1).has_value();
      const bool have2 = m2 < 2 || ctx.cache->get(h2, s, m2).has_value();
      if (!have1 || !have2) continue;
      auto cached_part = [&](const Component& comp, const std::string& h, Host host, std::size_t m,
                             std::map<std::size_t, Configuration>& memo) {
        if (auto it = memo.find(m); it != memo.end()) return it->second;
        if (m < 2) return solve_part(comp, host, m, s, params, nullptr, memo);
        const Configuration c = ctx.cache->get(h, s, m)->config;
        Configuration out(c.dim());
        for (std::size_t i = 0; i < c.size(); ++i) out.push_back(c.point(i), host, c.intrinsic(i));
        memo.emplace(m, out);
        return out;
      };
      Configuration a = cached_part(set.A1, h1, Host::A1, m1, memo1);
      Configuration b = cached_part(set.A2, h2, Host::A2, m2, memo2);
      auto cfg = adapt(dom, assemble(a, b));
      if (!cfg) continue;
      done[m1] = true;
      const double e = exact_energy(*cfg, s);
      assembled.push_back({std::move(*cfg), e});
    }
  }
  if (warm) assembled.push_back({*warm, exact_energy(*warm, s)});
  if (assembled.empty()) throw InfeasibleError("no feasible split of the points between A1 and A2");

  // Joint refinement of the most promising starts (and the warm start).
  std::vector<std::size_t> order(assembled.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return assembled[a].energy < assembled[b].energy; });
  std::vector<std::size_t> to_refine(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(params.refine_top, order.size())));
  if (warm && std::find(to_refine.begin(), to_refine.end(), assembled.size() - 1) == to_refine.end()) {
    to_refine.push_back(assembled.size() - 1);
  }

  std::vector<Candidate> refined(to_refine.size());
  std::vector<std::size_t> evals(to_refine.size(), 0);
  std::vector<std::exception_ptr> errors(to_refine.size());
  const auto T = static_cast<std::ptrdiff_t>(to_refine.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < T; ++k) {
    const auto ki = static_cast<std::size_t>(k);
    try {
      Annealer annealer(dom, s, params, params.seed + 1000003 * (ki + 1));
      Configuration c = annealer.run(assembled[to_refine[ki]].config);
      const double e = exact_energy(c, s);
      refined[ki] = Candidate{std::move(c), e};
      evals[ki] = annealer.evaluations();
    } catch (...) {
      errors[ki] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<Candidate> all = std::move(assembled);
  for (auto& c : refined) all.push_back(std::move(c));
  SolveResult out = finalize(all, s, true, params.tie_tol, SolveStatus::Heuristic, params.eval);
  for (auto e : evals) out.evaluations += e;
  out.depth = depth;
  return out;
}

Configuration greedy_insert(const SetSpec& set, const Configuration& config, double s, std::size_t depth,
                            std::uint64_t seed, std::size_t draws) {
  const Domain dom = make_domain(set, config.size() + 1, depth, 0);
  auto adapted = adapt(dom, config);
  Configuration base = adapted ? *adapted : config;
  std::unordered_set<std::string> occ;
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (adapted) {
      const std::string k = dom.part(base.host(i)).key(base.intrinsic(i));
      if (!k.empty()) occ.insert(k);
    }
  }
  Rng rng(seed);
  double best_u = std::numeric_limits<double>::infinity();
  std::optional<std::pair<const Part*, Intrinsic>> best;
  for (std::size_t k = 0; k < draws; ++k) {
    const Part& p = dom.parts[uniform_index(rng, dom.parts.size())];
    Intrinsic in = p.random(rng);
    const std::string key = p.key(in);
    if (!key.empty() && occ.count(key)) continue;
    const Vec x = p.realize(in);
    const double u = kernels::serial::potential_at(base.coords(), base.dim(), x, base.size(), s);
    if (std::isfinite(u) && u < best_u) {
      best_u = u;
      best.emplace(&p, std::move(in));
    }
  }
  if (!best) return base;
  base.push_back(best->first->realize(best->second), best->first->host, best->second);
  return base;
}

SolveResult solve(const SetSpec& set, std::size_t n, double s, const SearchParams& params, Cache* cache,
                  const Configuration* warm_start, std::optional<double> alpha_hint) {
  const std::string hash = set_hash(set);
  const bool is_union = std::holds_alternative<UnionSet>(set);
  std::optional<CacheEntry> cached = (cache && n >= 2) ? cache->get(hash, s, n) : std::nullopt;

  SolveResult r;
  if (const auto* u = std::get_if<UnionSet>(&set)) {
    UnionSolveContext ctx;
    ctx.cache = cache;
    ctx.alpha_hint = alpha_hint;
    ctx.warm_start = warm_start ? warm_start : (cached ? &cached->config : nullptr);
    r = minimize_union(*u, n, s, params, ctx);
  } else {
    r = minimize_local_search(set, n, s, params, warm_start ? warm_start : (cached ? &cached->config : nullptr));
  }

  if (cached) {
    try {
      check_configuration(cached->config, set);
      const double ce = riesz_energy(cached->config, s, params.eval).total;
      const std::size_t cn1 = a1_count(cached->config, is_union);
      if (ce < r.energy.total - params.tie_tol * std::abs(r.energy.total)) {
        r.config = cached->config;
        r.energy = riesz_energy(r.config, s, params.eval);
        r.N1 = cn1;
        r.status = parse_status(cached->status);
      } else if (ce <= r.energy.total + params.tie_tol * std::abs(r.energy.total)) {
        r.N1 = std::min(r.N1, cn1);
      }
      r.N2 = n - r.N1;
    } catch (const Error&) {
      // Stale entry for a different resolution or set; the fresh result stands.
    }
  }
  if (cache && n >= 2) cache->put(hash, s, n, r.energy.total, r.config, to_string(r.status));
  return r;
}

AsymptoticTrace sweep(const SetSpec& set, double s, const std::vector<std::size_t>& ns, const SearchParams& params,
                      const SweepOptions& opts, SweepStats* stats) {
  if (ns.empty()) throw ValidationError("sweep needs at least one N");
  for (std::size_t i = 1; i < ns.size(); ++i)
    if (ns[i] <= ns[i - 1]) throw ValidationError("sweep N values must be strictly increasing");

  AsymptoticTrace trace;
  trace.set_id = set_hash(set);
  trace.s = s;
  trace.d = dimension(set);
  if (const auto* u = std::get_if<UnionSet>(&set)) {
    trace.is_union = true;
    trace.a1_id = set_hash(u->A1);
    trace.a2_id = set_hash(u->A2);
  }
  SweepStats local;
  std::optional<Configuration> prev;

  for (const std::size_t n : ns) {
    TraceRecord rec;
    rec.N = n;
    Configuration best;
    std::optional<CacheEntry> cached =
        (opts.cache && !opts.force && n >= 2) ? opts.cache->get(trace.set_id, s, n) : std::nullopt;
    bool used_cache = false;
    if (cached) {
      try {
        check_configuration(cached->config, set);
        const EnergyReport rep = riesz_energy(cached->config, s, params.eval);
        best = cached->config;
        rec.E_best = rep.total;
        rec.min_dist = rep.min_dist;
        rec.N1 = trace.is_union ? best.count(Host::A1) : n;
        rec.status = cached->status;
        used_cache = true;
        ++local.cache_hits;
      } catch (const Error&) {
        used_cache = false;
      }
    }
    if (!used_cache) {
      SearchParams p = params;
      p.seed = params.seed + 1000 * n;
      std::optional<Configuration> warm;
      if (prev && prev->size() + 1 == n) warm = greedy_insert(set, *prev, s, p.depth, p.seed ^ 0x5bd1e995ULL);
      const SolveResult r = solve(set, n, s, p, opts.cache, warm ? &*warm : nullptr, opts.alpha_hint);
      best = r.config;
      rec.E_best = r.energy.total;
      rec.min_dist = n >= 2 ? r.energy.min_dist : 0.0;
      rec.N1 = r.N1;
      rec.status = to_string(r.status);
      ++local.solves;
    }
    rec.N2 = n - rec.N1;
    rec.G = n >= 2 ? normalized_energy(rec.E_best, n, s, trace.d) : 0.0;
    rec.frac1 = n > 0 ? static_cast<double>(rec.N1) / static_cast<double>(n) : 0.0;
    if (!std::isfinite(rec.min_dist)) rec.min_dist = 0.0;
    trace.records.push_back(rec);
    prev = best;
    if (opts.on_record) opts.on_record(trace);
  }
  if (stats) *stats = local;
  return trace;
}

}  // namespace rieszlab
