#include "cannings/paintbox.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "cannings/mathutil.hpp"

namespace cannings {

namespace {

struct YMoments {
  double mean;
  double second;
};

YMoments y_moments(const YLaw& law) {
  return std::visit(
      [](const auto& y) -> YMoments {
        using T = std::decay_t<decltype(y)>;
        if constexpr (std::is_same_v<T, YLawConstant>) {
          return {y.c, y.c * y.c};
        } else if constexpr (std::is_same_v<T, YLawGamma>) {
          double m = y.shape * y.scale;
          return {m, y.shape * (y.shape + 1.0) * y.scale * y.scale};
        } else {
          double m = 0.5 * (y.a + y.b);
          return {m, (y.a * y.a + y.a * y.b + y.b * y.b) / 3.0};
        }
      },
      law);
}

void validate_y_law(const YLaw& law) {
  std::visit(
      [](const auto& y) {
        using T = std::decay_t<decltype(y)>;
        if constexpr (std::is_same_v<T, YLawConstant>) {
          if (!(y.c > 0.0)) throw std::invalid_argument("YLaw: c must be > 0");
        } else if constexpr (std::is_same_v<T, YLawGamma>) {
          if (!(y.shape > 0.0) || !(y.scale > 0.0)) {
            throw std::invalid_argument("YLaw: gamma shape/scale must be > 0");
          }
        } else {
          if (!(0.0 < y.a && y.a < y.b)) {
            throw std::invalid_argument("YLaw: need 0 < a < b");
          }
        }
      },
      law);
}

double sample_y(const YLaw& law, SplitMix64& rng) {
  return std::visit(
      [&](const auto& y) -> double {
        using T = std::decay_t<decltype(y)>;
        if constexpr (std::is_same_v<T, YLawConstant>) {
          return y.c;
        } else if constexpr (std::is_same_v<T, YLawGamma>) {
          std::gamma_distribution<double> g(y.shape, y.scale);
          return g(rng);
        } else {
          return y.a + (y.b - y.a) * rng.uniform();
        }
      },
      law);
}

double gamma_draw(double shape, SplitMix64& rng) {
  std::gamma_distribution<double> g(shape, 1.0);
  return g(rng);
}

}  // namespace

void validate_model(const WeightModel& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SymmetricDirichlet>) {
          if (!(m.alpha > 0.0)) {
            throw std::invalid_argument("SymmetricDirichlet: alpha must be > 0");
          }
        } else if constexpr (std::is_same_v<T, DirichletType>) {
          validate_y_law(m.y_law);
        }
      },
      model);
}

WeightModel parse_weight_model(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  auto num = [&](std::size_t i) {
    std::size_t pos = 0;
    double v = std::stod(parts.at(i), &pos);
    if (pos != parts[i].size()) {
      throw std::invalid_argument("weight model: bad number '" + parts[i] + "'");
    }
    return v;
  };
  WeightModel model;
  if (parts.size() == 1 && parts[0] == "wf") {
    model = WrightFisher{};
  } else if (parts.size() == 2 && parts[0] == "dirichlet") {
    model = SymmetricDirichlet{num(1)};
  } else if (parts.size() >= 2 && parts[0] == "dirichlet-type") {
    if (parts[1] == "gamma" && parts.size() == 4) {
      model = DirichletType{YLawGamma{num(2), num(3)}};
    } else if (parts[1] == "uniform" && parts.size() == 4) {
      model = DirichletType{YLawUniform{num(2), num(3)}};
    } else if (parts[1] == "const" && parts.size() == 3) {
      model = DirichletType{YLawConstant{num(2)}};
    } else {
      throw std::invalid_argument("weight model: unknown dirichlet-type '" +
                                  text + "'");
    }
  } else {
    throw std::invalid_argument("weight model: cannot parse '" + text + "'");
  }
  validate_model(model);
  return model;
}

std::string weight_model_label(const WeightModel& model) {
  std::ostringstream out;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, WrightFisher>) {
          out << "wf";
        } else if constexpr (std::is_same_v<T, SymmetricDirichlet>) {
          out << "dirichlet:" << m.alpha;
        } else {
          std::visit(
              [&](const auto& y) {
                using U = std::decay_t<decltype(y)>;
                if constexpr (std::is_same_v<U, YLawConstant>) {
                  out << "dirichlet-type:const:" << y.c;
                } else if constexpr (std::is_same_v<U, YLawGamma>) {
                  out << "dirichlet-type:gamma:" << y.shape << ":" << y.scale;
                } else {
                  out << "dirichlet-type:uniform:" << y.a << ":" << y.b;
                }
              },
              m.y_law);
        }
      },
      model);
  return out.str();
}

bool is_degenerate_uniform(const WeightModel& model) {
  if (std::holds_alternative<WrightFisher>(model)) return true;
  if (const auto* d = std::get_if<DirichletType>(&model)) {
    return std::holds_alternative<YLawConstant>(d->y_law);
  }
  return false;
}

void validate_weight_vector(const WeightVector& wv) {
  if (wv.w.empty()) throw std::invalid_argument("WeightVector: empty");
  KahanSum sum;
  for (double x : wv.w) {
    if (!(x >= 0.0)) throw std::invalid_argument("WeightVector: negative entry");
    sum.add(x);
  }
  if (std::fabs(sum.value() - 1.0) > 1e-12) {
    throw std::invalid_argument("WeightVector: entries do not sum to 1");
  }
}

WeightVector sample_weights(const WeightModel& model, int n_pop,
                            SplitMix64& rng) {
  if (n_pop < 2) throw std::invalid_argument("sample_weights: n_pop < 2");
  validate_model(model);
  WeightVector wv;
  wv.w.assign(n_pop, 0.0);
  if (is_degenerate_uniform(model)) {
    std::fill(wv.w.begin(), wv.w.end(), 1.0 / n_pop);
    return wv;
  }
  KahanSum total;
  if (const auto* d = std::get_if<SymmetricDirichlet>(&model)) {
    for (auto& x : wv.w) {
      x = gamma_draw(d->alpha, rng);
      total.add(x);
    }
  } else {
    const auto& dt = std::get<DirichletType>(model);
    for (auto& x : wv.w) {
      x = sample_y(dt.y_law, rng);
      total.add(x);
    }
  }
  if (!(total.value() > 0.0)) {
    throw std::runtime_error("sample_weights: degenerate zero total");
  }
  for (auto& x : wv.w) x /= total.value();
  return wv;
}

std::optional<double> analytic_moment(const WeightModel& model, int n_pop,
                                      int order) {
  if (order < 1) throw std::invalid_argument("analytic_moment: order < 1");
  if (n_pop < 2) throw std::invalid_argument("analytic_moment: n_pop < 2");
  validate_model(model);
  if (is_degenerate_uniform(model)) {
    return std::pow(static_cast<double>(n_pop), -order);
  }
  if (const auto* d = std::get_if<SymmetricDirichlet>(&model)) {
    // Beta(alpha, (N-1)alpha) marginal: prod_j (alpha+j)/(N alpha+j).
    double m = 1.0;
    for (int j = 0; j < order; ++j) {
      m *= (d->alpha + j) / (n_pop * d->alpha + j);
    }
    return m;
  }
  return std::nullopt;
}

EstimatorResult empirical_moment(const WeightModel& model, int n_pop,
                                 int order, std::uint64_t replicates,
                                 SplitMix64& rng) {
  if (replicates < 1) throw std::invalid_argument("empirical_moment: reps < 1");
  if (order < 1) throw std::invalid_argument("empirical_moment: order < 1");
  validate_model(model);
  KahanSum sum, sumsq;
  auto draw_w1 = [&]() -> double {
    if (is_degenerate_uniform(model)) return 1.0 / n_pop;
    if (const auto* d = std::get_if<SymmetricDirichlet>(&model)) {
      double g1 = gamma_draw(d->alpha, rng);
      double g2 = gamma_draw((n_pop - 1) * d->alpha, rng);
      if (g1 + g2 <= 0.0) return 1.0 / n_pop;
      return g1 / (g1 + g2);
    }
    const auto& dt = std::get<DirichletType>(model);
    if (const auto* g = std::get_if<YLawGamma>(&dt.y_law)) {
      // Sum of N-1 iid gammas is one gamma; the scale cancels in the ratio.
      double y1 = gamma_draw(g->shape, rng);
      double rest = gamma_draw((n_pop - 1) * g->shape, rng);
      if (y1 + rest <= 0.0) return 1.0 / n_pop;
      return y1 / (y1 + rest);
    }
    double y1 = sample_y(dt.y_law, rng);
    double total = y1;
    for (int i = 1; i < n_pop; ++i) total += sample_y(dt.y_law, rng);
    return y1 / total;
  };
  for (std::uint64_t r = 0; r < replicates; ++r) {
    double v = std::pow(draw_w1(), order);
    sum.add(v);
    sumsq.add(v * v);
  }
  double n = static_cast<double>(replicates);
  EstimatorResult res;
  res.point = sum.value() / n;
  double var = std::max(0.0, sumsq.value() / n - res.point * res.point);
  res.stderr_ = replicates > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  res.ci_lo = res.point - 1.959963984540054 * res.stderr_;
  res.ci_hi = res.point + 1.959963984540054 * res.stderr_;
  res.replicates = replicates;
  res.method = "normal";
  return res;
}

double rho_squared(const WeightModel& model) {
  validate_model(model);
  if (std::holds_alternative<WrightFisher>(model)) return 1.0;
  if (const auto* d = std::get_if<SymmetricDirichlet>(&model)) {
    return 1.0 + 1.0 / d->alpha;
  }
  YMoments m = y_moments(std::get<DirichletType>(model).y_law);
  return m.second / (m.mean * m.mean);
}

double PopulationParams::selection_exponent() const {
  if (!(s > 0.0)) {
    throw std::domain_error("selection_exponent: requires s > 0");
  }
  return -std::log(s) / std::log(static_cast<double>(n_pop));
}

void validate_params(const PopulationParams& params) {
  if (params.n_pop < 2) throw std::invalid_argument("params: n_pop < 2");
  if (!(params.s >= 0.0 && params.s < 1.0)) {
    throw std::invalid_argument("params: s must be in [0,1)");
  }
  validate_model(params.weights);
}

ConditionReport check_regularity(const WeightModel& model,
                                 const std::vector<int>& n_grid,
                                 double k_const, std::uint64_t seed,
                                 std::uint64_t empirical_replicates) {
  if (n_grid.empty()) throw std::invalid_argument("check_regularity: empty grid");
  validate_model(model);
  ConditionReport report;
  report.k_const = k_const;
  std::uint64_t stream = 0;
  for (int n_pop : n_grid) {
    if (n_pop < 2) throw std::invalid_argument("check_regularity: N < 2");
    ConditionRow row;
    row.n_pop = n_pop;
    row.h_n = std::max(
        1, static_cast<int>(std::ceil(std::log(std::log(
               static_cast<double>(n_pop))))));
    auto moment = [&](int order) -> double {
      if (auto m = analytic_moment(model, n_pop, order)) return *m;
      auto rng = derive_stream(seed, stream++);
      return empirical_moment(model, n_pop, order,
                              std::max<std::uint64_t>(empirical_replicates,
                                                      100000),
                              rng)
          .point;
    };
    double m2 = moment(2);
    double m3 = moment(3);
    row.m2_scaled = m2 * n_pop * static_cast<double>(n_pop);
    row.m3_scaled = m3 * n_pop * static_cast<double>(n_pop) * n_pop;
    row.mohle = m2 * n_pop;
    row.moment_bound_ok = true;
    row.k_min_admissible = 0.0;
    for (int order = 1; order <= 2 * row.h_n; ++order) {
      double mn = moment(order);
      double bound = std::pow(k_const * row.h_n / n_pop, order);
      if (!(mn <= bound)) row.moment_bound_ok = false;
      double k_needed = n_pop * std::pow(mn, 1.0 / order) / row.h_n;
      row.k_min_admissible = std::max(row.k_min_admissible, k_needed);
    }
    report.rows.push_back(row);
  }
  return report;
}

double sample_prefix_mass(const WeightModel& model, int n_pop, int k,
                          SplitMix64& rng) {
  if (k < 0 || k > n_pop) {
    throw std::invalid_argument("sample_prefix_mass: k out of range");
  }
  if (k == 0) return 0.0;
  if (k == n_pop) return 1.0;
  if (is_degenerate_uniform(model)) {
    return static_cast<double>(k) / n_pop;
  }
  if (const auto* d = std::get_if<SymmetricDirichlet>(&model)) {
    // Aggregation property: S ~ Beta(k alpha, (N-k) alpha).
    double g1 = gamma_draw(k * d->alpha, rng);
    double g2 = gamma_draw((n_pop - k) * d->alpha, rng);
    if (g1 + g2 <= 0.0) return static_cast<double>(k) / n_pop;
    return g1 / (g1 + g2);
  }
  const auto& dt = std::get<DirichletType>(model);
  if (const auto* g = std::get_if<YLawGamma>(&dt.y_law)) {
    double s1 = gamma_draw(k * g->shape, rng);
    double s2 = gamma_draw((n_pop - k) * g->shape, rng);
    if (s1 + s2 <= 0.0) return static_cast<double>(k) / n_pop;
    return s1 / (s1 + s2);
  }
  double head = 0.0, total = 0.0;
  for (int i = 0; i < n_pop; ++i) {
    double y = sample_y(dt.y_law, rng);
    total += y;
    if (i < k) head += y;
  }
  return head / total;
}

OccupancySampler::OccupancySampler(const WeightModel& model, int n_pop)
    : model_(model), n_pop_(n_pop) {
  if (n_pop < 2) throw std::invalid_argument("OccupancySampler: n_pop < 2");
  validate_model(model);
  if (is_degenerate_uniform(model)) {
    mode_ = Mode::Uniform;
  } else if (const auto* d = std::get_if<SymmetricDirichlet>(&model)) {
    mode_ = Mode::PolyaUrn;
    alpha_ = d->alpha;
  } else {
    mode_ = Mode::Materialize;
  }
  stamp_.assign(n_pop, 0);
}

int OccupancySampler::distinct_of_uniform_throws(std::int64_t h,
                                                 SplitMix64& rng) {
  ++epoch_;
  int distinct = 0;
  for (std::int64_t i = 0; i < h; ++i) {
    auto box = static_cast<std::size_t>(rng.uniform_below(n_pop_));
    if (stamp_[box] != epoch_) {
      stamp_[box] = epoch_;
      ++distinct;
    }
  }
  return distinct;
}

int OccupancySampler::distinct_of_weighted_throws(std::int64_t h,
                                                  SplitMix64& rng) {
  WeightVector wv = sample_weights(model_, n_pop_, rng);
  cumulative_.resize(wv.w.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < wv.w.size(); ++i) {
    acc += wv.w[i];
    cumulative_[i] = acc;
  }
  cumulative_.back() = 1.0;
  ++epoch_;
  int distinct = 0;
  for (std::int64_t i = 0; i < h; ++i) {
    double u = rng.uniform();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    auto box = static_cast<std::size_t>(it - cumulative_.begin());
    if (box >= stamp_.size()) box = stamp_.size() - 1;
    if (stamp_[box] != epoch_) {
      stamp_[box] = epoch_;
      ++distinct;
    }
  }
  return distinct;
}

int OccupancySampler::sample(std::int64_t h, SplitMix64& rng) {
  if (h < 1) throw std::invalid_argument("OccupancySampler: h < 1");
  switch (mode_) {
    case Mode::Uniform:
      return distinct_of_uniform_throws(h, rng);
    case Mode::PolyaUrn: {
      // Marginalizing the Dirichlet weights turns the throws into a Polya
      // urn: ball m+1 opens a new box with probability (N-d)a/(Na+m).
      int distinct = 0;
      double n_alpha = n_pop_ * alpha_;
      for (std::int64_t m = 0; m < h; ++m) {
        double p_new = (n_pop_ - distinct) * alpha_ / (n_alpha + m);
        if (rng.uniform() < p_new) ++distinct;
      }
      return distinct;
    }
    case Mode::Materialize:
      return distinct_of_weighted_throws(h, rng);
  }
  return 0;
}

int distinct_boxes(std::int64_t h, const WeightVector& w, SplitMix64& rng) {
  if (h < 1) throw std::invalid_argument("distinct_boxes: h < 1");
  validate_weight_vector(w);
  std::vector<double> cumulative(w.w.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < w.w.size(); ++i) {
    acc += w.w[i];
    cumulative[i] = acc;
  }
  cumulative.back() = 1.0;
  std::vector<std::uint32_t> hits;
  hits.reserve(static_cast<std::size_t>(h));
  for (std::int64_t i = 0; i < h; ++i) {
    double u = rng.uniform();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    auto box = static_cast<std::uint32_t>(it - cumulative.begin());
    if (box >= w.w.size()) box = static_cast<std::uint32_t>(w.w.size() - 1);
    hits.push_back(box);
  }
  std::sort(hits.begin(), hits.end());
  return static_cast<int>(std::unique(hits.begin(), hits.end()) -
                          hits.begin());
}

}  // namespace cannings
