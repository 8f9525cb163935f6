#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "bubblereduce/bubble.hpp"
#include "bubblereduce/errors.hpp"
#include "bubblereduce/space_dims.hpp"
#include "bubblereduce/special.hpp"

namespace bubblereduce {

/// Mean of |u_1|^gamma over the uniform sphere S^{d-1} (d = 1 gives 1).
inline double component_moment(int d, double gamma) {
    if (d == 1) return 1.0;
    return std::exp(std::lgamma(0.5 * (gamma + 1.0)) + std::lgamma(0.5 * d) -
                    0.5 * std::log(M_PI) - std::lgamma(0.5 * (d + gamma)));
}

/// Mean of (u_1^2 + ... + u_k^2)^{gamma/2} over the uniform sphere S^{N-1}
/// split as R^k x R^h.
inline double block_moment(int k, int h, double gamma) {
    if (h == 0) return 1.0;
    return beta_fn(0.5 * (k + gamma), 0.5 * h) / beta_fn(0.5 * k, 0.5 * h);
}

/// Locally flat perturbation profile around a single critical point:
///   K(x) = base + (sum xi_i) |y|^gamma + sum_i a_i |z_i - etabar_i|^gamma
/// inside the ball |x - (0, etabar)| < delta, held constant at its boundary
/// spherical average outside.  The remainder term is dropped (R == 0).
///
/// kappa(s, t) evaluates the z-angular average of K at |y| = s,
/// |z - etabar| = t.  For h == 1 this is K itself; for h >= 2 the
/// per-component z-terms are replaced by their exact average over the
/// z-sphere, which leaves every single-center integral of K against a
/// cylindrical weight unchanged.
struct PerturbativeModel {
    SpaceDims dims;
    std::vector<double> center;  ///< etabar in R^h
    double base = 0.0;           ///< K(0, etabar)
    double gamma = 1.5;
    std::vector<double> xi;      ///< k coefficients, all nonzero
    std::vector<double> a;       ///< h coefficients, all nonzero
    double sigma = 0.5;
    double delta = 1.0;          ///< locality radius
    double epsilon = 0.0;        ///< perturbation size

    PerturbativeModel(SpaceDims d, std::vector<double> c, double base_, double gamma_,
                      std::vector<double> xi_, std::vector<double> a_, double sigma_,
                      double delta_, double eps)
        : dims(d),
          center(std::move(c)),
          base(base_),
          gamma(gamma_),
          xi(std::move(xi_)),
          a(std::move(a_)),
          sigma(sigma_),
          delta(delta_),
          epsilon(eps) {
        validate();
    }

    void validate() const {
        if (!(gamma > 1.0) || !(gamma < dims.N - 2))
            throw domain_error("PerturbativeModel: gamma must lie in (1, N-2)");
        if (!(sigma > 0.0) || !(sigma < 1.0))
            throw domain_error("PerturbativeModel: sigma must lie in (0, 1)");
        if (!(delta > 0.0)) throw domain_error("PerturbativeModel: delta > 0 required");
        if (epsilon < 0.0) throw domain_error("PerturbativeModel: epsilon >= 0 required");
        if (int(center.size()) != dims.h)
            throw domain_error("PerturbativeModel: center needs h components");
        if (int(xi.size()) != dims.k || int(a.size()) != dims.h)
            throw domain_error("PerturbativeModel: xi needs k and a needs h components");
        for (double x : xi)
            if (x == 0.0) throw domain_error("PerturbativeModel: all xi_i must be nonzero");
        for (double x : a)
            if (x == 0.0) throw domain_error("PerturbativeModel: all a_j must be nonzero");
    }

    double sum_xi() const {
        double s = 0.0;
        for (double x : xi) s += x;
        return s;
    }
    double sum_a() const {
        double s = 0.0;
        for (double x : a) s += x;
        return s;
    }

    /// Boundary spherical average of K over |x - (0, etabar)| = delta.
    double boundary_average() const {
        const double ymom = block_moment(dims.k, dims.h, gamma);
        // per-component z-moment over the full (N-1)-sphere
        const double cmom = component_moment(dims.N, gamma);
        return base + sum_xi() * std::pow(delta, gamma) * ymom +
               sum_a() * std::pow(delta, gamma) * cmom;
    }

    /// z-angular averaged K at s = |y|, t = |z - etabar|.
    double kappa(double s, double t) const {
        const double rho = std::hypot(s, t);
        if (rho >= delta) return boundary_average();
        const double zm = component_moment(dims.h, gamma);
        return base + sum_xi() * std::pow(s, gamma) + sum_a() * zm * std::pow(t, gamma);
    }

    /// Gradient (d/ds, d/dt) of kappa; zero outside the locality ball.
    void kappa_grad(double s, double t, double& dks, double& dkt) const {
        const double rho = std::hypot(s, t);
        dks = dkt = 0.0;
        if (rho >= delta) return;
        const double zm = component_moment(dims.h, gamma);
        if (s > 0.0) dks = sum_xi() * gamma * std::pow(s, gamma - 1.0);
        if (t > 0.0) dkt = sum_a() * zm * gamma * std::pow(t, gamma - 1.0);
    }
};

/// Flatness profile around a sequence of strictly local maxima:
///   phi(x) = K_j - q_j |x - (0, etabar^j)|^{gamma_j}   near center j,
/// with a_0 <= q_j <= a_1, extended globally as the maximum over sites,
/// clipped below at a positive floor.
struct MaxPointModel {
    SpaceDims dims;
    std::vector<std::vector<double>> centers;  ///< etabar^j in R^h
    std::vector<double> K;                     ///< site maxima, positive
    std::vector<double> gamma;                 ///< exponents in (N-2, N)
    std::vector<double> q;                     ///< envelope slopes, a0 <= q_j <= a1
    double a0 = 1.0, a1 = 1.0;
    double sigma = 0.5;
    double nu = 1.0;  ///< locality radius

    MaxPointModel(SpaceDims d, std::vector<std::vector<double>> cs, std::vector<double> K_,
                  std::vector<double> gamma_, std::vector<double> q_, double a0_, double a1_,
                  double sigma_, double nu_)
        : dims(d),
          centers(std::move(cs)),
          K(std::move(K_)),
          gamma(std::move(gamma_)),
          q(std::move(q_)),
          a0(a0_),
          a1(a1_),
          sigma(sigma_),
          nu(nu_) {
        validate();
    }

    void validate() const {
        if (centers.empty() || K.size() != centers.size() || gamma.size() != centers.size() ||
            q.size() != centers.size())
            throw domain_error("MaxPointModel: centers, K, gamma, q must have equal size");
        if (!(a0 > 0.0) || !(a0 <= a1)) throw domain_error("MaxPointModel: need 0 < a0 <= a1");
        for (std::size_t j = 0; j < centers.size(); ++j) {
            if (int(centers[j].size()) != dims.h)
                throw domain_error("MaxPointModel: each center needs h components");
            if (!(K[j] > 0.0)) throw domain_error("MaxPointModel: K_j > 0 required");
            if (!(gamma[j] > dims.N - 2) || !(gamma[j] < dims.N))
                throw domain_error("MaxPointModel: gamma_j must lie in (N-2, N)");
            if (!(q[j] >= a0) || !(q[j] <= a1))
                throw domain_error("MaxPointModel: q_j must lie in [a0, a1]");
        }
    }

    double floor_value() const { return 0.5 * *std::min_element(K.begin(), K.end()); }

    /// phi given the distances rho_j = |x - (0, etabar^j)| to each site.
    double phi_from_dists(const std::vector<double>& rho) const {
        double v = floor_value();
        for (std::size_t j = 0; j < centers.size(); ++j)
            v = std::fmax(v, K[j] - q[j] * std::pow(rho[j], gamma[j]));
        return v;
    }
};

/// A pair of bubbles with the interaction parameter
/// eps12 = (lambda_1 lambda_2 |eta^1 - eta^2|^2)^{(2-N)/2}.
struct TwoBubbleConfig {
    Bubble b1, b2;

    TwoBubbleConfig(Bubble x, Bubble y) : b1(std::move(x)), b2(std::move(y)) {
        if (!(b1.dims == b2.dims))
            throw domain_error("TwoBubbleConfig: bubbles must share dims");
    }

    double separation() const {
        double d2 = 0.0;
        for (int i = 0; i < b1.dims.h; ++i) {
            const double d = b1.eta[i] - b2.eta[i];
            d2 += d * d;
        }
        return std::sqrt(d2);
    }

    double eps12() const {
        const double sep = separation();
        if (sep == 0.0)
            throw degenerate_error("TwoBubbleConfig: coincident centers, eps12 undefined");
        return std::pow(b1.lambda * b2.lambda * sep * sep, 0.5 * (2 - b1.dims.N));
    }
};

inline double epsilon_ij(const TwoBubbleConfig& cfg) { return cfg.eps12(); }

/// A two-bubble approximate solution u = a_1 U_1 + a_2 U_2 (correction
/// dropped).  Amplitudes are 1 in the perturbative regime and K_j^{(2-N)/2}
/// in the flat-maximum regime.
struct ConcentrationAnsatz {
    Bubble b1, b2;
    std::array<double, 2> amplitudes{1.0, 1.0};
    double epsilon = 0.0;  ///< perturbation size of the originating model, if any

    ConcentrationAnsatz(Bubble x, Bubble y, std::array<double, 2> amps, double eps = 0.0)
        : b1(std::move(x)), b2(std::move(y)), amplitudes(amps), epsilon(eps) {
        if (!(b1.dims == b2.dims))
            throw domain_error("ConcentrationAnsatz: bubbles must share dims");
        if (!(amplitudes[0] > 0.0) || !(amplitudes[1] > 0.0))
            throw domain_error("ConcentrationAnsatz: amplitudes must be positive");
        if (eps < 0.0) throw domain_error("ConcentrationAnsatz: epsilon >= 0 required");
    }

    TwoBubbleConfig config() const { return TwoBubbleConfig(b1, b2); }
    double separation() const { return config().separation(); }
};

}  // namespace bubblereduce
