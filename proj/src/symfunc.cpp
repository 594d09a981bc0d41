#include "weyl/symfunc.hpp"

#include "weyl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace weyl::symfunc {

namespace {

double norm2(const Spectrum& w)
{
    double s = 0.0;
    for (double x : w) s += x * x;
    return std::sqrt(s);
}

double sum(const Spectrum& w)
{
    double s = 0.0;
    for (double x : w) s += x;
    return s;
}

void same_length(const Spectrum& x, const Spectrum& y)
{
    validate(x);
    validate(y);
    if (x.size() != y.size())
        throw DomainError("spectra of different length: " + std::to_string(x.size()) + " vs "
                          + std::to_string(y.size()));
}

Spectrum ones(std::size_t n) { return Spectrum(n, 1.0); }

} // namespace

std::string to_string(ConeLabel label)
{
    switch (label) {
    case ConeLabel::interior_gamma2: return "INTERIOR_GAMMA2";
    case ConeLabel::boundary_gamma2: return "BOUNDARY_GAMMA2";
    case ConeLabel::negative_gamma2: return "NEGATIVE_GAMMA2";
    case ConeLabel::outside: return "OUTSIDE";
    }
    return "OUTSIDE";
}

void validate(const Spectrum& w)
{
    if (w.size() < 2) throw DomainError("spectrum needs n >= 2 entries");
    for (double x : w)
        if (!std::isfinite(x)) throw DomainError("spectrum has a non-finite entry");
}

double sigma_k(const Spectrum& w, int k)
{
    validate(w);
    const int n = static_cast<int>(w.size());
    if (k < 0 || k > n)
        throw DomainError("sigma_k: k=" + std::to_string(k) + " outside [0," + std::to_string(n) + "]");
    // e[j] holds sigma_j of the entries seen so far
    std::vector<double> e(k + 1, 0.0);
    e[0] = 1.0;
    for (double x : w)
        for (int j = k; j >= 1; --j) e[j] += x * e[j - 1];
    return e[k];
}

double sigma2_polar(const Spectrum& x, const Spectrum& y)
{
    same_length(x, y);
    double sx = sum(x), acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += y[i] * (sx - x[i]);
    return acc;
}

ConeLabel cone_classify(const Spectrum& w, double tol)
{
    validate(w);
    if (!(tol > 0.0)) throw DomainError("cone_classify: tol must be positive");
    const double mag = norm2(w);
    const double t1 = tol * (1.0 + mag), t2 = tol * (1.0 + mag * mag);
    const double s1 = sigma_k(w, 1), s2 = sigma_k(w, 2);
    if (s1 > t1 && s2 > t2) return ConeLabel::interior_gamma2;
    if (std::abs(s2) <= t2 && s1 >= -t1) return ConeLabel::boundary_gamma2;
    // -w has sigma_1 = -s1 and the same sigma_2
    if ((-s1 > t1 && s2 > t2) || (std::abs(s2) <= t2 && -s1 >= -t1)) return ConeLabel::negative_gamma2;
    return ConeLabel::outside;
}

Spectrum sigma2_gradient(const Spectrum& w)
{
    validate(w);
    const double s1 = sum(w);
    Spectrum g(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) g[i] = s1 - w[i];
    return g;
}

double sigma2_hessian_form(const Spectrum& v) { return sigma2_polar(v, v); }

Lemma21Report lemma21_check(const Spectrum& w, const Spectrum& wm, double tol)
{
    same_length(w, wm);
    const double n = static_cast<double>(w.size());
    const double mw = norm2(w), mm = norm2(wm);
    const double s1 = sigma_k(w, 1), s2 = sigma_k(w, 2);
    if (std::abs(s1) <= tol * (1.0 + mw))
        throw PreconditionError("lemma21_check: sigma_1(W) = 0, the lemma does not apply");
    if (s2 < -tol * (1.0 + mw * mw))
        throw PreconditionError("lemma21_check: sigma_2(W) < 0");
    const double d2 = sigma2_polar(w, wm); // nabla_m sigma_2(W) at a diagonal point
    if (std::abs(s2) <= tol * (1.0 + mw * mw) && std::abs(d2) > tol * (1.0 + mw * mm))
        throw PreconditionError("lemma21_check: sigma_2(W) = 0 needs sigma_2(W, W_m) = 0");
    const double d1 = sigma_k(wm, 1);

    Lemma21Report r;
    r.lhs = -sigma2_polar(wm, wm);
    r.bound1 = -2.0 * d2 * d1 / s1 + 2.0 * d1 * d1 * s2 / (s1 * s1);
    const double s2WI = (n - 1.0) * s1;
    r.bound2 = -2.0 * d2 * d1 / s1 + d2 * d2 * n * (n - 1.0) / (s2WI * s2WI);
    auto ok = [&](double bound) {
        const double band = tol * (1.0 + std::abs(r.lhs) + std::abs(bound));
        return r.lhs >= std::min(bound, 0.0) - band;
    };
    r.pass1 = ok(r.bound1);
    r.pass2 = ok(r.bound2);
    r.pass = r.pass1 && r.pass2;
    return r;
}

EpsilonSweep claim_epsilon_sweep(const Spectrum& w_in, const Spectrum& v, double tol)
{
    same_length(w_in, v);
    Spectrum w = w_in;
    if (sum(w) < 0.0)
        for (double& x : w) x = -x;
    const double n = static_cast<double>(w.size());
    const double s1w = sum(w), s1v = sum(v);
    EpsilonSweep out;
    out.limit = sigma2_polar(v, v);
    for (int e = 2; e <= 8; ++e) {
        const double eps = std::pow(10.0, -e);
        Spectrum we = w, ve = v;
        const double c = eps * s1v / (s1w + n * eps);
        for (std::size_t i = 0; i < w.size(); ++i) {
            we[i] += eps;
            ve[i] -= c;
        }
        out.eps.push_back(eps);
        out.sigma2_vv.push_back(sigma2_polar(ve, ve));
        out.orthogonality.push_back(sigma2_polar(we, ve));
    }
    const double band = tol * (1.0 + norm2(v) * norm2(v));
    out.all_nonpositive = std::all_of(out.sigma2_vv.begin(), out.sigma2_vv.end(),
                                      [&](double x) { return x <= band; });
    // distance to the limit must not grow as eps shrinks
    out.monotone = true;
    for (std::size_t k = 1; k < out.sigma2_vv.size(); ++k)
        if (std::abs(out.sigma2_vv[k] - out.limit) > std::abs(out.sigma2_vv[k - 1] - out.limit) + band)
            out.monotone = false;
    return out;
}

bool hyperbolicity_claim_check(const Spectrum& w, const Spectrum& v, double tol)
{
    same_length(w, v);
    const double mw = norm2(w), mv = norm2(v);
    const double s1 = sigma_k(w, 1), s2 = sigma_k(w, 2);
    if (std::abs(s1) <= tol * (1.0 + mw))
        throw PreconditionError("claim: sigma_1(W) = 0, the claim does not apply");
    if (s2 < -tol * (1.0 + mw * mw)) throw PreconditionError("claim: sigma_2(W) < 0");
    if (std::abs(sigma2_polar(v, w)) > tol * (1.0 + mv * mw))
        throw PreconditionError("claim: sigma_2(V, W) != 0");
    const double band = tol * (1.0 + mv * mv);
    if (s2 <= tol * (1.0 + mw * mw)) {
        const EpsilonSweep sw = claim_epsilon_sweep(w, v, tol);
        return sw.all_nonpositive && sw.limit <= band;
    }
    return sigma2_polar(v, v) <= band;
}

Counterexample claim_counterexample(int n)
{
    if (n < 2) throw DomainError("claim_counterexample: n >= 2");
    return {Spectrum(n, 0.0), Spectrum(n, 1.0)};
}

namespace {

enum class Kind { interior, boundary, negative };

struct Sampler {
    explicit Sampler(int n, std::uint64_t seed) : n(n), rng(seed) {}

    Spectrum gaussian()
    {
        Spectrum g(n);
        for (double& x : g) x = normal(rng);
        return g;
    }

    Kind kind()
    {
        const double u = uniform(rng);
        if (u < 0.1) return Kind::boundary;
        if (u < 0.2) return Kind::negative;
        return Kind::interior;
    }

    // interior of Gamma_2: shift a gaussian along I until accepted
    Spectrum interior()
    {
        for (;;) {
            Spectrum w = gaussian();
            const double a = 0.2 + 1.8 * uniform(rng);
            const double shift = a * (norm2(w) + 0.1) / std::sqrt(static_cast<double>(n));
            for (double& x : w) x += shift;
            if (cone_classify(w) == ConeLabel::interior_gamma2) return w;
        }
    }

    // sigma_2 = 0, sigma_1 > 0: w = a I + v with v orthogonal to I
    Spectrum boundary()
    {
        Spectrum v = gaussian();
        const double mean = sum(v) / n;
        for (double& x : v) x -= mean;
        const double a = norm2(v) / std::sqrt(static_cast<double>(n) * (n - 1));
        for (double& x : v) x += a;
        return v;
    }

    int n;
    std::mt19937_64 rng;
    std::normal_distribution<double> normal{0.0, 1.0};
    std::uniform_real_distribution<double> uniform{0.0, 1.0};
};

// remove the sigma_2(w, .) component along I so that sigma_2(w, wm) = 0
void make_orthogonal_along_identity(const Spectrum& w, Spectrum& wm)
{
    const double c = sigma2_polar(w, wm) / sigma2_polar(w, ones(w.size()));
    for (double& x : wm) x -= c;
}

bool counterexample_fires(int n, bool lemma)
{
    const Counterexample ce = claim_counterexample(n);
    if (!(sigma2_polar(ce.v, ce.v) > 0.0 && sigma2_polar(ce.v, ce.w) == 0.0)) return false;
    try {
        if (lemma)
            lemma21_check(ce.w, ce.v);
        else
            hyperbolicity_claim_check(ce.w, ce.v);
    } catch (const PreconditionError&) {
        return true;
    }
    return false;
}

} // namespace

SuiteReport lemma21_suite(int n, int samples, std::uint64_t seed, double tol)
{
    if (n < 2) throw DomainError("lemma21_suite: n >= 2");
    Sampler s(n, seed);
    SuiteReport rep;
    rep.n = n;
    rep.samples = samples;
    rep.seed = seed;
    for (int k = 0; k < samples; ++k) {
        const Kind kind = s.kind();
        Spectrum w = kind == Kind::boundary ? s.boundary() : s.interior();
        if (kind == Kind::negative)
            for (double& x : w) x = -x;
        Spectrum wm = s.gaussian();
        const double scale = std::exp(2.0 * (s.uniform(s.rng) - 0.5));
        for (double& x : wm) x *= scale;
        if (kind == Kind::boundary) make_orthogonal_along_identity(w, wm);
        (kind == Kind::boundary ? rep.boundary : kind == Kind::negative ? rep.negative : rep.interior)++;
        if (lemma21_check(w, wm, tol).pass) ++rep.passed;
    }
    rep.counterexample_rejected = counterexample_fires(n, true);
    return rep;
}

SuiteReport claim_suite(int n, int samples, std::uint64_t seed, double tol)
{
    if (n < 2) throw DomainError("claim_suite: n >= 2");
    Sampler s(n, seed);
    SuiteReport rep;
    rep.n = n;
    rep.samples = samples;
    rep.seed = seed;
    for (int k = 0; k < samples; ++k) {
        const Kind kind = s.kind();
        Spectrum w = kind == Kind::boundary ? s.boundary() : s.interior();
        if (kind == Kind::negative)
            for (double& x : w) x = -x;
        Spectrum v = s.gaussian();
        const double ww = sigma2_polar(w, w);
        if (kind == Kind::boundary) {
            make_orthogonal_along_identity(w, v);
        } else {
            const double c = sigma2_polar(v, w) / ww;
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * w[i];
        }
        (kind == Kind::boundary ? rep.boundary : kind == Kind::negative ? rep.negative : rep.interior)++;
        if (hyperbolicity_claim_check(w, v, tol)) ++rep.passed;
    }
    rep.counterexample_rejected = counterexample_fires(n, false);
    return rep;
}

} // namespace weyl::symfunc
