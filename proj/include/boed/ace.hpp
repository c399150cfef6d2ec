#pragma once

#include "boed/design.hpp"
#include "boed/emulator.hpp"
#include "boed/network.hpp"
#include "boed/rng.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace boed {

class AceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Estimated expected utility and its standard error.
struct Evaluation {
    double value = 0.0;
    double se = 0.0;
};

/// Monte Carlo utility of a design with B draws under the given seed.
using UtilityFunction = std::function<Evaluation(const Design&, int B, std::uint64_t seed)>;

/**
 * Admissible designs. Planar spaces give each of the k coordinates of every
 * point the same interval; network spaces give point i the interval
 * [0, length of its path].
 */
struct DesignSpace {
    int n = 0;
    int k = 0;
    std::vector<std::pair<double, double>> axes;
    std::vector<NetworkPath> paths;

    static DesignSpace planar(int n, std::vector<std::pair<double, double>> axes);
    static DesignSpace network(int n, std::vector<NetworkPath> paths);

    bool on_network() const { return !paths.empty(); }
    std::pair<double, double> domain(const Design& d, int i, int j) const;
    bool contains(const Design& d) const;
    /// Uniform coordinates; network points first draw a path uniformly.
    Design random_design(Rng& rng) const;
};

struct CoordinateProposal {
    double value = 0.0;
    Eigen::VectorXd inputs;
    Eigen::VectorXd evaluations;
    EmulatorFit fit;
    bool fallback = false;
};

/**
 * Evaluate the utility at Q equally spaced values of coordinate (i, j), all
 * with the same seed, fit an emulator and return the maximizer of its mean
 * over a dense grid. Ties with the current value keep the current value.
 */
CoordinateProposal emulate_coordinate(const Design& design, int i, int j, const DesignSpace& space,
                                      const UtilityFunction& utility, int Q, int B1, std::uint64_t seed,
                                      int grid = 1000, int threads = 1);

struct AcceptanceResult {
    bool accepted = false;
    double p_star = 0.5;
    Evaluation current;
    Evaluation proposal;
};

/// Probability that the proposal has the higher expected utility.
double acceptance_probability(const Evaluation& current, const Evaluation& proposal);

/// Evaluate both designs with B2 draws under one seed and accept with probability p*.
AcceptanceResult acceptance_test(const Design& current, const Design& proposal, const UtilityFunction& utility,
                                 int B2, std::uint64_t seed);

struct AceOptions {
    int N1 = 30;
    int K = 1;
    int Q = 20;
    int B1 = 1500;
    int B2 = 1000;
    int grid = 1000;
    int threads = 1;
    /// Optional starting designs, used in order for the first starts.
    std::vector<Design> initial_designs;

    void validate() const;
};

struct TraceRow {
    int start = 0;
    int sweep = 0;
    int coordinate = 0;
    double proposal = 0.0;
    /// NaN when the proposal equals the current value and no test is run.
    double p_star = 0.0;
    bool accepted = false;
    /// Estimated utility of the design retained after this step; NaN before any test.
    double utility = 0.0;
};

struct StartResult {
    Design initial;
    Design final_design;
    Evaluation final_evaluation;
    std::vector<TraceRow> trace;
    bool failed = false;
    std::string error;
};

struct AceResult {
    Design best;
    Evaluation best_evaluation;
    int best_start = -1;
    std::vector<StartResult> starts;
};

/**
 * K random starts of N1 coordinate sweeps each; every start's final design
 * is re-evaluated with B2 draws under a shared seed and the best is returned.
 */
AceResult optimize(const DesignSpace& space, const UtilityFunction& utility, const AceOptions& options,
                   std::uint64_t seed);

/// CSV with header "start,sweep,coordinate,proposal,p_star,accepted,utility".
void write_trace_csv(std::ostream& out, const AceResult& result);

}  // namespace boed
