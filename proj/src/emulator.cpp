#include "boed/emulator.hpp"

#include <cmath>
#include <limits>

namespace boed {

namespace {

Eigen::MatrixXd correlation(const Eigen::VectorXd& x, double length) {
    const Eigen::Index q = x.size();
    Eigen::MatrixXd r(q, q);
    for (Eigen::Index a = 0; a < q; ++a) {
        for (Eigen::Index b = 0; b < q; ++b) {
            const double d = (x(a) - x(b)) / length;
            r(a, b) = std::exp(-0.5 * d * d);
        }
    }
    return r;
}

struct Candidate {
    double loglik = -std::numeric_limits<double>::infinity();
    double length = 1.0;
    double ratio = 1.0;
};

Candidate profile(const Eigen::VectorXd& x, const Eigen::VectorXd& z, double length, double ratio) {
    Candidate c;
    c.length = length;
    c.ratio = ratio;
    Eigen::MatrixXd k = correlation(x, length);
    k.diagonal().array() += ratio;
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() != Eigen::Success) return c;
    const Eigen::VectorXd v = llt.matrixL().solve(z);
    const double q = static_cast<double>(z.size());
    const double s2 = v.squaredNorm() / q;
    if (!(s2 > 0.0)) return c;
    const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    c.loglik = -0.5 * q * std::log(s2) - 0.5 * logdet;
    return c;
}

}  // namespace

EmulatorFit fit_emulator(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    EmulatorFit fit;
    fit.x = x;
    fit.y = y;
    const Eigen::Index q = x.size();
    if (q < 2 || y.size() != q || !y.allFinite() || !x.allFinite()) return fit;
    fit.y_mean = y.mean();
    const double sd = std::sqrt((y.array() - fit.y_mean).square().sum() / static_cast<double>(q - 1));
    if (!(sd > 1e-300) || !std::isfinite(sd)) {
        fit.ok = true;
        fit.alpha = Eigen::VectorXd::Zero(q);
        return fit;
    }
    fit.y_scale = sd;
    const Eigen::VectorXd z = (y.array() - fit.y_mean) / sd;

    Candidate best;
    for (int a = 0; a < 30; ++a) {
        const double length = 0.02 * std::pow(100.0, a / 29.0);
        for (int b = 0; b < 13; ++b) {
            const double ratio = 1e-6 * std::pow(1e6, b / 12.0);
            const Candidate c = profile(x, z, length, ratio);
            if (c.loglik > best.loglik) best = c;
        }
    }
    if (!std::isfinite(best.loglik)) return fit;
    for (int pass = 0; pass < 2; ++pass) {
        const double step = pass == 0 ? 1.2 : 1.05;
        const Candidate centre = best;
        for (int a = -3; a <= 3; ++a) {
            for (int b = -3; b <= 3; ++b) {
                const double length = centre.length * std::pow(step, a);
                const double ratio = std::max(1e-8, centre.ratio * std::pow(step * step, b));
                const Candidate c = profile(x, z, length, ratio);
                if (c.loglik > best.loglik) best = c;
            }
        }
    }

    Eigen::MatrixXd k = correlation(x, best.length);
    k.diagonal().array() += best.ratio;
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() != Eigen::Success) return fit;
    fit.alpha = llt.solve(z);
    const double s2 = z.dot(fit.alpha) / static_cast<double>(q);
    fit.length_scale = best.length;
    fit.signal = s2;
    fit.noise = s2 * best.ratio;
    fit.log_likelihood = best.loglik;
    fit.informative = true;
    fit.ok = fit.alpha.allFinite();
    return fit;
}

double EmulatorFit::predict(double x_new) const {
    if (!informative) return y_mean;
    double s = 0.0;
    for (Eigen::Index a = 0; a < x.size(); ++a) {
        const double d = (x_new - x(a)) / length_scale;
        s += std::exp(-0.5 * d * d) * alpha(a);
    }
    return y_mean + y_scale * s;
}

}  // namespace boed
