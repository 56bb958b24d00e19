#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace wef {

// How step (a) of each iteration picks the nest that lays the Levy proposal.
enum class CuckooSelection {
  LevyRank,  // rank drawn as floor(|Levy sample|) over nests sorted best-first
  Uniform,   // every nest equally likely
};

struct CsParams {
  std::size_t nest_count = 25;
  double pa = 0.25;
  std::size_t max_iters = 200;
  double levy_beta = 1.5;
  double step_scale = 0.01;  // fraction of the box width per coordinate
  std::uint64_t seed = 0;
  CuckooSelection selection = CuckooSelection::LevyRank;

  void validate() const;
  std::size_t abandon_count() const;
};

struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  static Box unit(std::size_t dim) { return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)}; }
  std::size_t dim() const noexcept { return lower.size(); }
  bool contains(std::span<const double> x) const;
  void validate() const;
};

struct CsIteration {
  double best = 0.0;  // all-time best fitness after the iteration
  double mean = 0.0;  // mean fitness of the population after the iteration
};

struct CsResult {
  std::vector<double> best_solution;
  double best_fitness = 0.0;
  std::vector<CsIteration> history;
  std::size_t evaluations = 0;
};

using Fitness = std::function<double(std::span<const double>)>;
using Population = std::vector<std::vector<double>>;

// Mantegna sigma for the Levy exponent beta.
double mantegna_sigma(double beta);

// u / |v|^(1/beta) per coordinate, u ~ N(0, sigma(beta)^2), v ~ N(0, 1).
std::vector<double> levy_step(std::size_t dim, double beta, std::mt19937_64& rng);

// First seeds.size() nests are the seeds verbatim, the rest uniform in the
// box. Deterministic per params.seed.
Population cs_seed_population(const CsParams& params, const Box& box,
                              std::span<const std::vector<double>> seeds = {});

// Maximizes `fitness` over the box. Each iteration makes one Levy proposal
// from a chosen nest, lets it replace a random nest it beats, then
// regenerates the ceil(pa * nests) worst nests other than the best one.
// Throws ErrorKind::Optimization if the fitness returns a non-finite value.
CsResult cs_optimize(const Fitness& fitness, const Box& box, const CsParams& params,
                     std::span<const std::vector<double>> seeds = {});

// iteration,best,mean
std::string cs_history_csv(const CsResult& result);

}  // namespace wef
