#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace fkcell {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Isotropic material constants. Strong ellipticity (mu > 0, lambda + mu > 0)
// is required by every consumer; validate() is called at the entry points so
// that invalid parameter sets can be constructed and reported.
struct LameParams {
    double lambda = 0.0;
    double mu = 0.0;

    void validate() const {
        if (!(mu > 0.0))
            throw std::domain_error("LameParams: mu > 0 violated (mu = " +
                                    std::to_string(mu) + ")");
        if (!(lambda + mu > 0.0))
            throw std::domain_error("LameParams: lambda + mu > 0 violated (lambda + mu = " +
                                    std::to_string(lambda + mu) + ")");
    }

    double young() const { return mu * (3.0 * lambda + 2.0 * mu) / (lambda + mu); }
    double poisson() const { return lambda / (2.0 * (lambda + mu)); }
};

// (C e, e) for the isotropic tensor C_ijkl = lambda d_ij d_kl + mu (d_ik d_jl + d_il d_jk),
// evaluated from a displacement gradient G with G(k,j) = d_j u^(k).
inline double elastic_energy_density(const LameParams& lame, const Mat2& grad) {
    const double div = grad(0, 0) + grad(1, 1);
    const double e12 = 0.5 * (grad(0, 1) + grad(1, 0));
    return lame.lambda * div * div +
           2.0 * lame.mu * (grad(0, 0) * grad(0, 0) + grad(1, 1) * grad(1, 1) +
                            2.0 * e12 * e12);
}

}  // namespace fkcell
