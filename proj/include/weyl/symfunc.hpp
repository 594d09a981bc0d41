#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace weyl::symfunc {

// Principal values, or the diagonal of a tensor at a point where it is diagonal.
using Spectrum = std::vector<double>;

enum class ConeLabel { interior_gamma2, boundary_gamma2, negative_gamma2, outside };

std::string to_string(ConeLabel label);

inline constexpr double default_tol = 1e-10;

// Throws DomainError on n < 2 or non-finite entries.
void validate(const Spectrum& w);

double sigma_k(const Spectrum& w, int k);

// sum_{i != j} x_i y_j
double sigma2_polar(const Spectrum& x, const Spectrum& y);

ConeLabel cone_classify(const Spectrum& w, double tol = default_tol);

// (sigma_2^{11}, ..., sigma_2^{nn}) with sigma_2^{ii} = sigma_1 - w_i
Spectrum sigma2_gradient(const Spectrum& w);

// Diagonal part of the second derivative of sigma_2 applied to (v, v).
double sigma2_hessian_form(const Spectrum& v);

struct Lemma21Report {
    double lhs = 0.0;     // -sigma_2(W_m, W_m)
    double bound1 = 0.0;
    double bound2 = 0.0;
    bool pass1 = false;
    bool pass2 = false;
    bool pass = false;
};

// Throws PreconditionError when sigma_1(w) vanishes, sigma_2(w) < 0, or a
// boundary w is paired with a wm that breaks sigma_2(w, wm) = 0.
Lemma21Report lemma21_check(const Spectrum& w, const Spectrum& wm, double tol = default_tol);

// Returns sigma_2(v, v) <= 0 for sigma_2(v, w) = 0.  Boundary w goes through the
// epsilon-regularized sweep.  Precondition failures throw PreconditionError.
bool hyperbolicity_claim_check(const Spectrum& w, const Spectrum& v, double tol = default_tol);

struct EpsilonSweep {
    std::vector<double> eps;
    std::vector<double> sigma2_vv;     // sigma_2(V_eps, V_eps)
    std::vector<double> orthogonality; // sigma_2(W_eps, V_eps)
    bool all_nonpositive = false;
    bool monotone = false;
    double limit = 0.0; // sigma_2(V, V)
};

// W_eps = W + eps I, V_eps = V - eps sigma_1(V) I / (sigma_1(W) + n eps),
// eps in {1e-2, ..., 1e-8}.  W is flipped to sigma_1(W) > 0 first.
EpsilonSweep claim_epsilon_sweep(const Spectrum& w, const Spectrum& v, double tol = default_tol);

struct SuiteReport {
    int n = 0;
    int samples = 0;
    int passed = 0;
    int interior = 0;
    int boundary = 0;
    int negative = 0;
    std::uint64_t seed = 0;
    bool counterexample_rejected = false;
    bool pass() const { return passed == samples && counterexample_rejected; }
};

// Randomized realizable instances for lemma21_check, fixed seed.
SuiteReport lemma21_suite(int n, int samples, std::uint64_t seed, double tol = default_tol);

// Randomized instances of the hyperbolicity claim, fixed seed.
SuiteReport claim_suite(int n, int samples, std::uint64_t seed, double tol = default_tol);

// W = 0 and V = (1, ..., 1): sigma_2(V, W) = 0 while sigma_2(V, V) = n(n-1) > 0.
struct Counterexample {
    Spectrum w, v;
};
Counterexample claim_counterexample(int n);

} // namespace weyl::symfunc
