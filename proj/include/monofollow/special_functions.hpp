#pragma once

namespace monofollow {

/// Gamma function via the Lanczos approximation (g = 7, nine terms) with the
/// reflection formula below 1/2. Relative error is below 1e-13 on (0, 10].
double lanczos_gamma(double x);

/// Which exponential kernel multiplies e^{-t^2} t^{-nu-1} in the Hermite integral.
enum class HermiteKernel {
    Plain,  // e^{-2tz}:       H_nu(z)
    Odd,    // sinh(2tz):     (H_nu(-z) - H_nu(z)) / 2
    Even,   // cosh(2tz):     (H_nu(-z) + H_nu(z)) / 2
};

/// Hermite function of negative order from its integral representation
///   H_nu(z) = 1/Gamma(-nu) * int_0^inf exp(-t^2 - 2 t z) t^(-nu-1) dt,  nu < 0.
/// The t^(-nu-1) endpoint singularity is removed by t = u^(-1/nu) on [0, 1].
/// Throws DomainError for nu >= 0 and IntegrabilityError if quadrature stalls.
double hermite_negative_order(double nu, double z, HermiteKernel kernel = HermiteKernel::Plain);

/// (H_nu(-z) - H_nu(z)) / 2 without cancellation.
double hermite_odd_part(double nu, double z);

/// (H_nu(-z) + H_nu(z)) / 2.
double hermite_even_part(double nu, double z);

/// H_nu together with its derivative H'_nu = 2 nu H_{nu-1}.
class HermiteEval {
public:
    struct Value {
        double value;
        double derivative;
    };

    explicit HermiteEval(double nu);

    double order() const noexcept { return nu_; }
    Value operator()(double z) const;

private:
    double nu_;
};

}  // namespace monofollow
