#include "boed/ace.hpp"

#include "boed/linalg.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace boed {

DesignSpace DesignSpace::planar(int n, std::vector<std::pair<double, double>> axes) {
    if (n < 1) throw AceError("design needs at least one point");
    if (axes.empty()) throw AceError("planar space needs at least one axis");
    for (const auto& [lo, hi] : axes) {
        if (!(hi > lo)) throw AceError("axis interval is empty");
    }
    DesignSpace s;
    s.n = n;
    s.k = static_cast<int>(axes.size());
    s.axes = std::move(axes);
    return s;
}

DesignSpace DesignSpace::network(int n, std::vector<NetworkPath> paths) {
    if (n < 1) throw AceError("design needs at least one point");
    if (paths.empty()) throw AceError("network space needs at least one path");
    for (const auto& p : paths) {
        if (!(p.length > 0.0)) throw AceError("path has zero length");
    }
    DesignSpace s;
    s.n = n;
    s.k = 1;
    s.paths = std::move(paths);
    return s;
}

std::pair<double, double> DesignSpace::domain(const Design& d, int i, int j) const {
    if (i < 0 || i >= n || j < 0 || j >= k) throw AceError("coordinate index out of range");
    if (on_network()) {
        const int p = d.path.at(static_cast<std::size_t>(i));
        if (p < 0 || p >= static_cast<int>(paths.size())) throw AceError("path index out of range");
        return {0.0, paths[static_cast<std::size_t>(p)].length};
    }
    return axes[static_cast<std::size_t>(j)];
}

bool DesignSpace::contains(const Design& d) const {
    if (d.points() != n || d.dims() != k) return false;
    if (on_network() && static_cast<int>(d.path.size()) != n) return false;
    if (!on_network() && !d.path.empty()) return false;
    for (int i = 0; i < n; ++i) {
        if (on_network()) {
            const int p = d.path[static_cast<std::size_t>(i)];
            if (p < 0 || p >= static_cast<int>(paths.size())) return false;
        }
        for (int j = 0; j < k; ++j) {
            const auto [lo, hi] = domain(d, i, j);
            const double v = d.coords(i, j);
            if (!(v >= lo && v <= hi)) return false;
        }
    }
    return true;
}

Design DesignSpace::random_design(Rng& rng) const {
    Design d;
    d.coords.resize(n, k);
    if (on_network()) {
        std::uniform_int_distribution<int> pick(0, static_cast<int>(paths.size()) - 1);
        d.path.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) d.path[static_cast<std::size_t>(i)] = pick(rng);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) {
            const auto [lo, hi] = domain(d, i, j);
            d.coords(i, j) = lo + (hi - lo) * uniform01(rng);
        }
    }
    return d;
}

CoordinateProposal emulate_coordinate(const Design& design, int i, int j, const DesignSpace& space,
                                      const UtilityFunction& utility, int Q, int B1, std::uint64_t seed, int grid,
                                      int threads) {
    if (Q < 4) throw AceError("Q must be at least 4");
    if (B1 < 1) throw AceError("B1 must be positive");
    if (grid < 2) throw AceError("grid must have at least two points");
    const auto [lo, hi] = space.domain(design, i, j);
    const double width = hi - lo;
    const double current = design.coords(i, j);

    CoordinateProposal out;
    out.inputs.resize(Q);
    out.evaluations.resize(Q);
    for (int q = 0; q < Q; ++q) out.inputs(q) = lo + width * q / (Q - 1);
    parallel_for(static_cast<std::size_t>(Q), threads, [&](std::size_t q) {
        Design trial = design;
        trial.coords(i, j) = out.inputs(static_cast<Eigen::Index>(q));
        out.evaluations(static_cast<Eigen::Index>(q)) = utility(trial, B1, seed).value;
    });

    const Eigen::VectorXd xn = (out.inputs.array() - lo) / width;
    out.fit = fit_emulator(xn, out.evaluations);
    if (!out.fit.ok) {
        out.fallback = true;
        Eigen::Index best = 0;
        double best_value = -std::numeric_limits<double>::infinity();
        for (Eigen::Index q = 0; q < Q; ++q) {
            if (std::isfinite(out.evaluations(q)) && out.evaluations(q) > best_value) {
                best_value = out.evaluations(q);
                best = q;
            }
        }
        out.value = std::isfinite(best_value) ? out.inputs(best) : current;
        return out;
    }

    const double at_current = out.fit.predict((current - lo) / width);
    double best_x = current;
    double best_value = at_current;
    const double tol = 1e-12 * std::max(1.0, std::abs(at_current));
    for (int g = 0; g < grid; ++g) {
        const double u = static_cast<double>(g) / (grid - 1);
        const double v = out.fit.predict(u);
        if (v > best_value + tol) {
            best_value = v;
            best_x = lo + width * u;
        }
    }
    out.value = best_x;
    return out;
}

double acceptance_probability(const Evaluation& current, const Evaluation& proposal) {
    const double diff = proposal.value - current.value;
    const double se = std::hypot(current.se, proposal.se);
    if (!(se > 0.0)) {
        if (diff > 0.0) return 1.0;
        if (diff < 0.0) return 0.0;
        return 0.5;
    }
    return 0.5 * std::erfc(-diff / (se * std::sqrt(2.0)));
}

AcceptanceResult acceptance_test(const Design& current, const Design& proposal, const UtilityFunction& utility,
                                 int B2, std::uint64_t seed) {
    if (B2 < 1) throw AceError("B2 must be positive");
    AcceptanceResult r;
    const std::uint64_t eval_seed = derive_seed(seed, stream::draw);
    r.current = utility(current, B2, eval_seed);
    r.proposal = utility(proposal, B2, eval_seed);
    r.p_star = acceptance_probability(r.current, r.proposal);
    Rng rng = make_rng(derive_seed(seed, stream::accept));
    r.accepted = uniform01(rng) < r.p_star;
    return r;
}

void AceOptions::validate() const {
    if (N1 < 0) throw AceError("N1 must be nonnegative");
    if (K < 1) throw AceError("K must be positive");
    if (Q < 4) throw AceError("Q must be at least 4");
    if (B1 < 1 || B2 < 1) throw AceError("B1 and B2 must be positive");
    if (grid < 2) throw AceError("grid must have at least two points");
}

AceResult optimize(const DesignSpace& space, const UtilityFunction& utility, const AceOptions& options,
                   std::uint64_t seed) {
    options.validate();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    AceResult result;
    result.starts.resize(static_cast<std::size_t>(options.K));
    const std::uint64_t final_seed = derive_seed(seed, stream::final_eval);

    for (int s = 0; s < options.K; ++s) {
        StartResult& start = result.starts[static_cast<std::size_t>(s)];
        const std::uint64_t start_seed = derive_seed(seed, stream::start, static_cast<std::uint64_t>(s));
        try {
            if (s < static_cast<int>(options.initial_designs.size())) {
                start.initial = options.initial_designs[static_cast<std::size_t>(s)];
                if (!space.contains(start.initial)) throw AceError("initial design lies outside the design space");
            } else {
                Rng rng = make_rng(start_seed);
                start.initial = space.random_design(rng);
            }
            Design current = start.initial;
            double current_utility = nan;
            std::uint64_t step = 0;
            for (int sweep = 0; sweep < options.N1; ++sweep) {
                for (int i = 0; i < space.n; ++i) {
                    for (int j = 0; j < space.k; ++j, ++step) {
                        const CoordinateProposal prop =
                            emulate_coordinate(current, i, j, space, utility, options.Q, options.B1,
                                               derive_seed(start_seed, stream::emulate, step), options.grid,
                                               options.threads);
                        TraceRow row;
                        row.start = s;
                        row.sweep = sweep;
                        row.coordinate = i * space.k + j;
                        row.proposal = prop.value;
                        if (prop.value == current.coords(i, j)) {
                            row.p_star = nan;
                            row.accepted = false;
                            row.utility = current_utility;
                        } else {
                            Design candidate = current;
                            candidate.coords(i, j) = prop.value;
                            const AcceptanceResult test =
                                acceptance_test(current, candidate, utility, options.B2,
                                                derive_seed(start_seed, stream::accept, step));
                            row.p_star = test.p_star;
                            row.accepted = test.accepted;
                            if (test.accepted) {
                                current = std::move(candidate);
                                current_utility = test.proposal.value;
                            } else {
                                current_utility = test.current.value;
                            }
                            row.utility = current_utility;
                        }
                        start.trace.push_back(row);
                    }
                }
            }
            start.final_design = current;
            start.final_evaluation = utility(current, options.B2, final_seed);
        } catch (const std::exception& e) {
            start.failed = true;
            start.error = e.what();
        }
    }

    for (int s = 0; s < options.K; ++s) {
        const StartResult& start = result.starts[static_cast<std::size_t>(s)];
        if (start.failed) continue;
        if (result.best_start < 0 || start.final_evaluation.value > result.best_evaluation.value) {
            result.best_start = s;
            result.best = start.final_design;
            result.best_evaluation = start.final_evaluation;
        }
    }
    if (result.best_start < 0) {
        throw AceError("all random starts failed: " + result.starts.front().error);
    }
    return result;
}

namespace {

std::string format_number(double v) {
    if (std::isnan(v)) return "NA";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_trace_csv(std::ostream& out, const AceResult& result) {
    out << "start,sweep,coordinate,proposal,p_star,accepted,utility\n";
    for (const auto& start : result.starts) {
        for (const auto& r : start.trace) {
            out << r.start << ',' << r.sweep << ',' << r.coordinate << ',' << format_number(r.proposal) << ','
                << format_number(r.p_star) << ',' << (r.accepted ? 1 : 0) << ',' << format_number(r.utility)
                << '\n';
        }
    }
}

}  // namespace boed
