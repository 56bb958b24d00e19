#include "wef/cuckoo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "wef/error.hpp"

namespace wef {

void CsParams::validate() const {
  if (nest_count < 2) throw Error(ErrorKind::Validation, "cs.nest_count must be >= 2");
  if (!(pa > 0.0 && pa < 1.0)) throw Error(ErrorKind::Validation, "cs.pa must lie in (0, 1)");
  if (max_iters < 1) throw Error(ErrorKind::Validation, "cs.max_iters must be >= 1");
  if (!(levy_beta > 1.0 && levy_beta <= 2.0)) {
    throw Error(ErrorKind::Validation, "cs.levy_beta must lie in (1, 2]");
  }
  if (!(step_scale > 0.0)) throw Error(ErrorKind::Validation, "cs.step_scale must be positive");
}

std::size_t CsParams::abandon_count() const {
  const auto k = static_cast<std::size_t>(std::ceil(pa * static_cast<double>(nest_count) - 1e-12));
  return std::min(k, nest_count - 1);
}

bool Box::contains(std::span<const double> x) const {
  if (x.size() != dim()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
  }
  return true;
}

void Box::validate() const {
  if (lower.empty() || lower.size() != upper.size()) {
    throw Error(ErrorKind::Validation, "search box needs matching nonempty bounds");
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] <= upper[i])) throw Error(ErrorKind::Validation, "search box has lower > upper");
  }
}

double mantegna_sigma(double beta) {
  const double num = std::tgamma(1.0 + beta) * std::sin(std::numbers::pi * beta / 2.0);
  const double den = std::tgamma((1.0 + beta) / 2.0) * beta * std::pow(2.0, (beta - 1.0) / 2.0);
  return std::pow(num / den, 1.0 / beta);
}

std::vector<double> levy_step(std::size_t dim, double beta, std::mt19937_64& rng) {
  if (dim < 1) throw Error(ErrorKind::Validation, "levy_step dim must be >= 1");
  if (!(beta > 1.0 && beta <= 2.0)) throw Error(ErrorKind::Validation, "levy beta must lie in (1, 2]");
  std::normal_distribution<double> u_dist(0.0, mantegna_sigma(beta));
  std::normal_distribution<double> v_dist(0.0, 1.0);
  std::vector<double> step(dim);
  for (auto& s : step) {
    const double u = u_dist(rng);
    const double v = v_dist(rng);
    s = u / std::pow(std::abs(v), 1.0 / beta);
  }
  return step;
}

namespace {

std::vector<double> random_point(const Box& box, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(box.dim());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = box.lower[i] + unit(rng) * (box.upper[i] - box.lower[i]);
  }
  return x;
}

Population seed_population(const CsParams& params, const Box& box,
                           std::span<const std::vector<double>> seeds, std::mt19937_64& rng) {
  params.validate();
  box.validate();
  if (seeds.size() > params.nest_count) {
    throw Error(ErrorKind::Validation, std::to_string(seeds.size()) + " seeds exceed nest_count " +
                                           std::to_string(params.nest_count));
  }
  Population pop;
  pop.reserve(params.nest_count);
  for (const auto& s : seeds) {
    if (!box.contains(s)) throw Error(ErrorKind::Validation, "seed vector lies outside the search box");
    pop.push_back(s);
  }
  while (pop.size() < params.nest_count) pop.push_back(random_point(box, rng));
  return pop;
}

std::string describe(std::span<const double> x) {
  std::ostringstream out;
  out.precision(17);
  out << '(';
  for (std::size_t i = 0; i < x.size(); ++i) out << (i ? ", " : "") << x[i];
  out << ')';
  return out.str();
}

}  // namespace

Population cs_seed_population(const CsParams& params, const Box& box,
                              std::span<const std::vector<double>> seeds) {
  std::mt19937_64 rng(params.seed);
  return seed_population(params, box, seeds, rng);
}

CsResult cs_optimize(const Fitness& fitness, const Box& box, const CsParams& params,
                     std::span<const std::vector<double>> seeds) {
  std::mt19937_64 rng(params.seed);
  Population nests = seed_population(params, box, seeds, rng);
  const std::size_t n = nests.size();
  const std::size_t dim = box.dim();

  CsResult result;
  auto evaluate = [&](const std::vector<double>& x) {
    const double f = fitness(x);
    ++result.evaluations;
    if (!std::isfinite(f)) {
      throw Error(ErrorKind::Optimization, "fitness is not finite at " + describe(x));
    }
    if (result.best_solution.empty() || f > result.best_fitness) {
      result.best_fitness = f;
      result.best_solution = x;
    }
    return f;
  };

  std::vector<double> fit(n);
  for (std::size_t i = 0; i < n; ++i) fit[i] = evaluate(nests[i]);

  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> order(n);
  const std::size_t abandon = params.abandon_count();

  for (std::size_t iter = 0; iter < params.max_iters; ++iter) {
    std::size_t i = 0;
    if (params.selection == CuckooSelection::LevyRank) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fit[a] > fit[b]; });
      const double r = std::abs(levy_step(1, params.levy_beta, rng)[0]);
      i = order[static_cast<std::size_t>(std::min(std::floor(r), static_cast<double>(n - 1)))];
    } else {
      i = pick(rng);
    }

    const auto step = levy_step(dim, params.levy_beta, rng);
    std::vector<double> proposal(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      const double width = box.upper[d] - box.lower[d];
      proposal[d] = std::clamp(nests[i][d] + params.step_scale * width * step[d], box.lower[d],
                               box.upper[d]);
    }
    const double f_new = evaluate(proposal);

    const std::size_t j = pick(rng);
    if (f_new > fit[j]) {
      nests[j] = std::move(proposal);
      fit[j] = f_new;
    }

    const auto best = static_cast<std::size_t>(std::max_element(fit.begin(), fit.end()) - fit.begin());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fit[a] < fit[b]; });
    std::size_t replaced = 0;
    for (auto k : order) {
      if (replaced == abandon) break;
      if (k == best) continue;
      nests[k] = random_point(box, rng);
      fit[k] = evaluate(nests[k]);
      ++replaced;
    }

    const double mean = std::accumulate(fit.begin(), fit.end(), 0.0) / static_cast<double>(n);
    result.history.push_back({result.best_fitness, mean});
  }
  return result;
}

std::string cs_history_csv(const CsResult& result) {
  std::ostringstream out;
  out.precision(17);
  out << "iteration,best,mean\n";
  for (std::size_t i = 0; i < result.history.size(); ++i) {
    out << i + 1 << ',' << result.history[i].best << ',' << result.history[i].mean << '\n';
  }
  return out.str();
}

}  // namespace wef
