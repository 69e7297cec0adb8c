#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace cph {

using cplx = std::complex<double>;

/// Polynomial with complex coefficients in ascending powers.
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<cplx> coeffs);
    Poly(std::initializer_list<double> coeffs);

    static Poly from_real(const std::vector<double>& coeffs);
    static Poly constant(cplx c);
    static Poly monomial(int k, cplx c = 1.0);
    /// (s - root)
    static Poly linear(cplx root);
    /// prod (s - r_k)
    static Poly from_roots(const std::vector<cplx>& roots);

    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<cplx>& coeffs() const { return c_; }
    cplx operator[](int k) const;
    cplx leading() const { return c_.empty() ? cplx(0.0) : c_.back(); }

    cplx operator()(cplx s) const;
    /// Sum of |a_k| |s|^k, the natural scale for rounding error of evaluation at s.
    double eval_scale(cplx s) const;
    double norm() const;

    Poly derivative() const;
    /// Coefficients of p(x + h) in powers of h.
    Poly shifted(cplx x) const;
    /// Divide by (s - root); the remainder is returned through rem.
    Poly deflate(cplx root, cplx* rem = nullptr) const;
    /// Quotient and remainder of division by d.
    void divmod(const Poly& d, Poly& quot, Poly& rem) const;
    /// Drop trailing coefficients with |a| <= tol * norm().
    Poly trimmed(double rel_tol) const;
    Poly conj() const;
    bool is_real(double rel_tol = 1e-12) const;
    std::vector<double> real_coeffs() const;

    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly& operator*=(cplx k);
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(Poly a, cplx k) { return a *= k; }
    friend Poly operator*(cplx k, Poly a) { return a *= k; }
    friend Poly operator*(const Poly& a, const Poly& b);
    Poly pow(int n) const;

private:
    void normalize();
    std::vector<cplx> c_;
};

struct Root {
    cplx value;
    int multiplicity = 1;
};

/// All roots with multiplicity repeated, Newton polished.
std::vector<cplx> roots(const Poly& p);

/// Group roots closer than rel_tol (relative) into one root with multiplicity.
/// Groups that are looser but pass a derivative test on p are also merged.
std::vector<Root> cluster_roots(const Poly& p, const std::vector<cplx>& raw, double rel_tol = 1e-6);

/// roots() followed by cluster_roots().
std::vector<Root> roots_clustered(const Poly& p);

/// num / (lead * prod (s - pole)^mult)
///   = polynomial_part + sum_pole sum_j residues[pole][j-1] / (s - pole)^j
struct PartialFractions {
    std::vector<Root> poles;
    std::vector<std::vector<cplx>> residues;
    Poly polynomial_part;

    cplx operator()(cplx s) const;
};

PartialFractions partial_fractions(const Poly& num, const std::vector<Root>& den_roots, cplx lead = 1.0);

}  // namespace cph
