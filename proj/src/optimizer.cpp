#include "ehcr/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>

#include "ehcr/battery.hpp"

namespace ehcr {

double largest_gain_mean(const Model& model) {
  double best = 0.0;
  for (const auto& profile : model.profiles) {
    const auto sensing = sensing_stats(model, profile);
    const auto est = estimator_variances(model, profile, sensing);
    best = std::max({best, est.var_hat[0], est.var_hat[1]});
  }
  return best;
}

std::vector<double> omega_grid(int points) {
  if (points < 1) throw std::invalid_argument("omega grid needs at least one point");
  if (points == 1) return {1.0};
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) out[i] = static_cast<double>(i) / (points - 1);
  return out;
}

std::vector<double> theta_grid(const Model& model, const SearchConfig& search) {
  if (search.grid_theta < 1) throw std::invalid_argument("theta grid needs at least one point");
  const double lo = search.theta_min;
  const double hi = std::max(lo, search.theta_max_factor * largest_gain_mean(model));
  if (search.grid_theta == 1) return {lo};
  std::vector<double> out(static_cast<std::size_t>(search.grid_theta));
  const double step = std::log(hi / lo) / (search.grid_theta - 1);
  for (int j = 0; j < search.grid_theta; ++j) out[j] = lo * std::exp(step * j);
  out.back() = hi;
  return out;
}

Surface objective_surface(const Model& model, std::size_t su, const std::vector<double>& omegas,
                          const std::vector<double>& thetas) {
  Surface s{omegas, thetas, Eigen::MatrixXd(omegas.size(), thetas.size()),
            Eigen::MatrixXd(omegas.size(), thetas.size())};
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    for (std::size_t j = 0; j < thetas.size(); ++j) {
      try {
        const auto v = evaluate_point(model, su, {omegas[i], thetas[j]});
        s.rate(i, j) = v.rate;
        s.interference(i, j) = v.interference;
      } catch (const ChainError&) {
        s.rate(i, j) = std::numeric_limits<double>::quiet_NaN();
        s.interference(i, j) = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  return s;
}

namespace {

struct Candidate {
  PolicyParams params;
  PointValue value;
};

// Every point evaluated for one SU, memoized by (omega, theta).
class CandidateSet {
 public:
  CandidateSet(const Model& model, std::size_t su, SearchDiagnostics& diag) : model_(model), su_(su), diag_(diag) {}

  // Returns the candidate index, or -1 if the chain failed at this point.
  int add(PolicyParams p) {
    p.omega = std::clamp(p.omega, 0.0, 1.0);
    p.theta = std::max(p.theta, 0.0);
    const auto key = std::make_pair(p.omega, p.theta);
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    int idx = -1;
    ++diag_.evaluations;
    try {
      const auto v = evaluate_point(model_, su_, p);
      if (std::isfinite(v.rate) && std::isfinite(v.interference)) {
        idx = static_cast<int>(items_.size());
        items_.push_back({p, v});
      } else {
        ++diag_.failed_evaluations;
      }
    } catch (const ChainError&) {
      ++diag_.failed_evaluations;
    }
    index_.emplace(key, idx);
    return idx;
  }

  const Candidate& operator[](int i) const { return items_[static_cast<std::size_t>(i)]; }
  bool empty() const { return items_.empty(); }

  // Highest rate with interference <= budget; ties go to less interference, then
  // smaller omega and theta so the choice never depends on insertion order.
  int best_under(double budget) const {
    int best = -1;
    for (int i = 0; i < static_cast<int>(items_.size()); ++i) {
      if (items_[i].value.interference > budget) continue;
      if (best < 0 || better(items_[i], items_[best])) best = i;
    }
    return best;
  }

  int best_penalized(double lambda) const {
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(items_.size()); ++i) {
      const double score = items_[i].value.rate - lambda * items_[i].value.interference;
      if (best < 0 || score > best_score || (score == best_score && better(items_[i], items_[best]))) {
        best = i;
        best_score = score;
      }
    }
    return best;
  }

  int least_interference() const {
    int best = -1;
    for (int i = 0; i < static_cast<int>(items_.size()); ++i) {
      if (best < 0) {
        best = i;
        continue;
      }
      const auto& a = items_[i].value;
      const auto& b = items_[best].value;
      if (a.interference < b.interference || (a.interference == b.interference && a.rate > b.rate)) best = i;
    }
    return best;
  }

  double max_rate() const {
    double r = 0.0;
    for (const auto& c : items_) r = std::max(r, c.value.rate);
    return r;
  }
  double max_interference() const {
    double r = 0.0;
    for (const auto& c : items_) r = std::max(r, c.value.interference);
    return r;
  }

 private:
  static bool better(const Candidate& a, const Candidate& b) {
    if (a.value.rate != b.value.rate) return a.value.rate > b.value.rate;
    if (a.value.interference != b.value.interference) return a.value.interference < b.value.interference;
    if (a.params.omega != b.params.omega) return a.params.omega < b.params.omega;
    return a.params.theta < b.params.theta;
  }

  const Model& model_;
  std::size_t su_;
  SearchDiagnostics& diag_;
  std::vector<Candidate> items_;
  std::map<std::pair<double, double>, int> index_;
};

using Joint = std::vector<int>;

class Search {
 public:
  Search(const Model& model, const SearchConfig& cfg, SearchDiagnostics& diag) : model_(model), cfg_(cfg), diag_(diag) {
    for (std::size_t n = 0; n < model.profiles.size(); ++n) sets_.emplace_back(model, n, diag);
  }

  std::vector<CandidateSet>& sets() { return sets_; }

  double rate(const Joint& x) const {
    std::vector<double> r;
    for (std::size_t n = 0; n < x.size(); ++n) r.push_back(sets_[n][x[n]].value.rate);
    return compensated_sum(r);
  }
  double aic(const Joint& x) const {
    std::vector<double> v;
    for (std::size_t n = 0; n < x.size(); ++n) v.push_back(sets_[n][x[n]].value.interference);
    return aic_lhs(v);
  }
  bool feasible(const Joint& x) const { return aic(x) <= model_.config.interference_cap; }

  // Block-coordinate ascent: each SU takes its best point within the budget the others leave.
  Joint sweep(Joint x) {
    double current = rate(x);
    for (int s = 0; s < cfg_.max_sweeps; ++s) {
      ++diag_.sweeps;
      for (std::size_t n = 0; n < x.size(); ++n) {
        std::vector<double> others;
        for (std::size_t m = 0; m < x.size(); ++m) {
          if (m != n) others.push_back(sets_[m][x[m]].value.interference);
        }
        const double budget = model_.config.interference_cap - compensated_sum(others);
        const int j = sets_[n].best_under(budget);
        if (j < 0 || j == x[n]) continue;
        Joint trial = x;
        trial[n] = j;
        if (feasible(trial) && sets_[n][j].value.rate > sets_[n][x[n]].value.rate) x = trial;
      }
      const double next = rate(x);
      const double gain = next - current;
      current = next;
      if (!(gain > cfg_.tolerance * std::max(std::abs(current), 1e-300))) break;
    }
    return x;
  }

 private:
  const Model& model_;
  const SearchConfig& cfg_;
  SearchDiagnostics& diag_;
  std::vector<CandidateSet> sets_;
};

} // namespace

OptimizationResult solve_p1(const Model& model, const SearchConfig& cfg) {
  if (model.profiles.empty()) throw std::invalid_argument("solve_p1: no secondary users");
  if (cfg.refine_levels < 0 || cfg.max_sweeps < 1) throw std::invalid_argument("solve_p1: bad search settings");
  const std::size_t users = model.profiles.size();
  OptimizationResult result;
  auto& diag = result.diagnostics;
  diag.grid_omega = cfg.grid_omega;
  diag.grid_theta = cfg.grid_theta;
  diag.refine_levels = cfg.refine_levels;

  const auto omegas = omega_grid(cfg.grid_omega);
  const auto thetas = theta_grid(model, cfg);
  const double omega_step = cfg.grid_omega > 1 ? 1.0 / (cfg.grid_omega - 1) : 1.0;
  const double log_theta_step = cfg.grid_theta > 1 ? std::log(thetas.back() / thetas.front()) / (cfg.grid_theta - 1) : 1.0;
  diag.omega_step = omega_step;
  diag.log_theta_step = log_theta_step;

  Search search(model, cfg, diag);
  auto& sets = search.sets();
  for (std::size_t n = 0; n < users; ++n) {
    for (double w : omegas) {
      for (double t : thetas) sets[n].add({w, t});
    }
  }
  std::vector<Joint> warm;
  for (const auto& start : cfg.warm_starts) {
    if (start.size() != users) throw std::invalid_argument("solve_p1: warm start has the wrong number of SUs");
    Joint x(users);
    bool ok = true;
    for (std::size_t n = 0; n < users; ++n) {
      x[n] = sets[n].add(start[n]);
      ok = ok && x[n] >= 0;
    }
    if (ok) warm.push_back(x);
  }
  for (std::size_t n = 0; n < users; ++n) {
    if (sets[n].empty()) throw ChainError("no policy point produced a solvable battery chain");
  }

  auto finish = [&](const Joint& x, bool feasible) {
    result.params.clear();
    result.per_su.clear();
    for (std::size_t n = 0; n < users; ++n) {
      result.params.push_back(sets[n][x[n]].params);
      result.per_su.push_back(sets[n][x[n]].value);
    }
    result.rate = search.rate(x);
    result.aic = search.aic(x);
    result.feasible = feasible;
    return result;
  };

  Joint least(users);
  for (std::size_t n = 0; n < users; ++n) least[n] = sets[n].least_interference();
  if (!search.feasible(least)) return finish(least, false);

  // Starting points: least interference, an equal split of the cap, a multiplier scan, warm starts.
  std::set<Joint> starts{least};
  const double cap = model.config.interference_cap;
  {
    Joint x(users);
    for (std::size_t n = 0; n < users; ++n) {
      const int j = sets[n].best_under(cap / static_cast<double>(users));
      x[n] = j >= 0 ? j : least[n];
    }
    if (search.feasible(x)) starts.insert(x);
  }
  {
    double rmax = 0.0, imax = 0.0;
    for (const auto& s : sets) {
      rmax = std::max(rmax, s.max_rate());
      imax = std::max(imax, s.max_interference());
    }
    const double scale = imax > 0.0 ? rmax / imax : 1.0;
    std::vector<double> lambdas{0.0};
    for (int q = 0; q < cfg.lagrange_points; ++q) {
      lambdas.push_back(scale * std::pow(10.0, -3.0 + 6.0 * q / std::max(1, cfg.lagrange_points - 1)));
    }
    for (double lambda : lambdas) {
      Joint x(users);
      for (std::size_t n = 0; n < users; ++n) x[n] = sets[n].best_penalized(lambda);
      if (search.feasible(x)) starts.insert(x);
    }
  }
  for (const auto& x : warm) {
    if (search.feasible(x)) starts.insert(x);
  }
  diag.starts = static_cast<int>(starts.size());

  Joint incumbent = least;
  double best = search.rate(least);
  auto consider = [&](const Joint& x) {
    const double r = search.rate(x);
    if (search.feasible(x) && r > best) {
      best = r;
      incumbent = x;
      if (cfg.keep_trajectory) diag.trajectory.push_back(r);
    }
  };
  for (const auto& s : starts) consider(search.sweep(s));

  for (int level = 1; level <= cfg.refine_levels; ++level) {
    const double dw = omega_step / std::pow(2.0, level);
    const double dl = log_theta_step / std::pow(2.0, level);
    diag.omega_step = dw;
    diag.log_theta_step = dl;
    for (std::size_t n = 0; n < users; ++n) {
      const auto centre = sets[n][incumbent[n]].params;
      for (int a = -2; a <= 2; ++a) {
        for (int b = -2; b <= 2; ++b) {
          const double theta = centre.theta > 0.0 ? centre.theta * std::exp(b * dl) : (b <= 0 ? 0.0 : cfg.theta_min * std::exp((b - 1) * dl));
          sets[n].add({centre.omega + a * dw, theta});
        }
      }
    }
    consider(search.sweep(incumbent));
  }
  return finish(incumbent, true);
}

} // namespace ehcr
