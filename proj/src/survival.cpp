#include "hybrid/survival.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hybrid/csv.hpp"
#include "oc_detail.hpp"

namespace hybrid {
namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

// In-place lower-triangular Cholesky of the p x p matrix a (row-major).
// Returns -1 on success, else the index of the column whose pivot failed.
int cholesky_factor(std::vector<double>& a, int p) {
    double max_diag = 0.0;
    for (int j = 0; j < p; ++j) max_diag = std::max(max_diag, a[j * p + j]);
    const double tol = (max_diag > 0.0 ? max_diag : 1.0) * 1e-12;
    for (int j = 0; j < p; ++j) {
        double d = a[j * p + j];
        for (int t = 0; t < j; ++t) d -= a[j * p + t] * a[j * p + t];
        if (!(d > tol)) return j;
        const double l = std::sqrt(d);
        a[j * p + j] = l;
        for (int i = j + 1; i < p; ++i) {
            double s = a[i * p + j];
            for (int t = 0; t < j; ++t) s -= a[i * p + t] * a[j * p + t];
            a[i * p + j] = s / l;
        }
    }
    return -1;
}

// Solves (L L^T) x = b given the factored matrix from cholesky_factor.
std::vector<double> cholesky_solve(const std::vector<double>& l, int p,
                                   const std::vector<double>& b) {
    std::vector<double> y(p), x(p);
    for (int i = 0; i < p; ++i) {
        double s = b[i];
        for (int t = 0; t < i; ++t) s -= l[i * p + t] * y[t];
        y[i] = s / l[i * p + i];
    }
    for (int i = p - 1; i >= 0; --i) {
        double s = y[i];
        for (int t = i + 1; t < p; ++t) s -= l[t * p + i] * x[t];
        x[i] = s / l[i * p + i];
    }
    return x;
}

// Inverse from the factored matrix: solve for each unit vector.
std::vector<std::vector<double>> cholesky_inverse(const std::vector<double>& l, int p) {
    std::vector<std::vector<double>> inv(p, std::vector<double>(p, 0.0));
    std::vector<double> e(p, 0.0);
    for (int j = 0; j < p; ++j) {
        e[j] = 1.0;
        const std::vector<double> col = cholesky_solve(l, p, e);
        for (int i = 0; i < p; ++i) inv[i][j] = col[i];
        e[j] = 0.0;
    }
    // symmetrize against round-off
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < i; ++j) {
            const double v = 0.5 * (inv[i][j] + inv[j][i]);
            inv[i][j] = inv[j][i] = v;
        }
    return inv;
}

double logistic(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

struct LogisticFit {
    std::vector<double> beta;  // intercept first, then covariate slopes
    bool converged = false;
};

// Newton-Raphson logistic regression of y on (1, covariates), with
// step-halving on the log-likelihood and a separation guard.
LogisticFit fit_logistic(const std::vector<Subject>& rows, const std::vector<char>& y) {
    const int k = static_cast<int>(rows.front().covariates.size());
    const int p = k + 1;
    const std::size_t n = rows.size();

    auto eta_of = [&](const std::vector<double>& beta, std::size_t i) {
        double e = beta[0];
        for (int j = 0; j < k; ++j) e += beta[j + 1] * rows[i].covariates[j];
        return e;
    };
    auto loglik = [&](const std::vector<double>& beta) {
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double eta = eta_of(beta, i);
            // log L_i = y*eta - log(1 + exp(eta)), computed overflow-safely
            ll += (y[i] ? eta : 0.0) - (eta > 30.0 ? eta : std::log1p(std::exp(eta)));
        }
        return ll;
    };

    LogisticFit fit;
    fit.beta.assign(p, 0.0);
    std::vector<double> grad(p), info(p * p);
    for (int iter = 0; iter < 50; ++iter) {
        std::fill(grad.begin(), grad.end(), 0.0);
        std::fill(info.begin(), info.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double mu = logistic(eta_of(fit.beta, i));
            const double w = mu * (1.0 - mu);
            const double r = (y[i] ? 1.0 : 0.0) - mu;
            grad[0] += r;
            info[0] += w;
            for (int a = 0; a < k; ++a) {
                const double xa = rows[i].covariates[a];
                grad[a + 1] += r * xa;
                info[(a + 1) * p] += w * xa;
                for (int b = 0; b <= a; ++b)
                    info[(a + 1) * p + (b + 1)] += w * xa * rows[i].covariates[b];
            }
        }
        if (max_abs(grad) <= 1e-8) {
            fit.converged = true;
            return fit;
        }
        std::vector<double> l = info;
        if (cholesky_factor(l, p) >= 0) return fit;  // singular information
        const std::vector<double> step = cholesky_solve(l, p, grad);
        const double ll0 = loglik(fit.beta);
        double scale = 1.0;
        bool accepted = false;
        std::vector<double> cand(p);
        for (int h = 0; h < 30; ++h) {
            for (int j = 0; j < p; ++j) cand[j] = fit.beta[j] + scale * step[j];
            if (loglik(cand) >= ll0 - 1e-10) {
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if (!accepted) return fit;
        fit.beta = cand;
        if (max_abs(fit.beta) > 30.0) return fit;  // separation
    }
    return fit;
}

void check_covariates(const std::vector<Subject>& subjects, std::size_t k, const char* who) {
    for (const Subject& s : subjects)
        if (s.covariates.size() != k)
            throw std::invalid_argument(std::string(who) + ": covariate length mismatch");
}

}  // namespace

std::string group_name(Group g) {
    switch (g) {
        case Group::treatment: return "treatment";
        case Group::control: return "control";
        case Group::rwd: return "rwd";
    }
    throw std::logic_error("group_name: unknown group");
}

CovariateSpec CovariateSpec::bernoulli(double p) {
    CovariateSpec s;
    s.kind = Kind::bernoulli;
    s.p = p;
    return s;
}

CovariateSpec CovariateSpec::normal(double mean, double sd) {
    CovariateSpec s;
    s.kind = Kind::normal;
    s.mean = mean;
    s.sd = sd;
    return s;
}

double CovariateSpec::draw(Substream& rng) const {
    if (kind == Kind::bernoulli) return rng.next_unit() < p ? 1.0 : 0.0;
    return mean + sd * rng.next_normal();
}

void SurvivalScenario::validate() const {
    if (!(theta_T > 0.0)) throw std::invalid_argument("theta_T must be > 0");
    if (!(theta_R > 0.0)) throw std::invalid_argument("theta_R must be > 0");
    if (!(baseline.lambda > 0.0)) throw std::invalid_argument("baseline lambda must be > 0");
    if (!(baseline.shape > 0.0)) throw std::invalid_argument("baseline shape must be > 0");
    if (covariate_model.empty())
        throw std::invalid_argument("covariate_model must be non-empty");
    if (cox_coeffs.size() != covariate_model.size())
        throw std::invalid_argument("cox_coeffs length must match covariate_model");
    if (enroll_coeffs.size() != covariate_model.size())
        throw std::invalid_argument("enroll_coeffs length must match covariate_model");
    for (const CovariateSpec& c : covariate_model) {
        if (c.kind == CovariateSpec::Kind::bernoulli) {
            if (!(c.p > 0.0 && c.p < 1.0))
                throw std::invalid_argument("bernoulli covariate p must lie in (0, 1)");
        } else if (!(c.sd > 0.0)) {
            throw std::invalid_argument("normal covariate sd must be > 0");
        }
    }
    if (n_trial < 2) throw std::invalid_argument("n_trial must be at least 2");
    if (n_external < 1) throw std::invalid_argument("n_external must be at least 1");
    if (n_registry < n_trial + n_external)
        throw std::invalid_argument("n_registry must be at least n_trial + n_external");
    if (target_events < 1) throw std::invalid_argument("target_events must be >= 1");
    if (target_events > n_trial + n_external)
        throw std::invalid_argument("target_events must not exceed total subjects");
    if (!(registry_followup > 0.0))
        throw std::invalid_argument("registry_followup must be > 0");
}

std::vector<Subject> generate_registry(int n, const SurvivalScenario& scenario,
                                       Substream& rng) {
    scenario.validate();
    if (n < scenario.n_trial + scenario.n_external)
        throw std::invalid_argument(
            "generate_registry: n must be at least n_trial + n_external");
    std::vector<Subject> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Subject s;
        s.id = i;
        s.covariates.reserve(scenario.covariate_model.size());
        for (const CovariateSpec& c : scenario.covariate_model)
            s.covariates.push_back(c.draw(rng));
        out.push_back(std::move(s));
    }
    return out;
}

EnrollResult enroll_and_match(const std::vector<Subject>& registry,
                              const SurvivalScenario& scenario, Substream& rng) {
    scenario.validate();
    const std::size_t n = registry.size();
    const std::size_t n_trial = static_cast<std::size_t>(scenario.n_trial);
    const std::size_t n_external = static_cast<std::size_t>(scenario.n_external);
    if (n < n_trial + n_external)
        throw std::invalid_argument(
            "enroll_and_match: registry smaller than n_trial + n_external");
    const std::size_t k = scenario.covariate_model.size();
    check_covariates(registry, k, "enroll_and_match");
    {
        std::set<long> ids;
        for (const Subject& s : registry) ids.insert(s.id);
        if (ids.size() != n)
            throw std::invalid_argument("enroll_and_match: duplicate subject ids");
    }

    // Bernoulli enrollment per subject, in registry order.
    std::vector<std::size_t> eligible;
    std::vector<std::pair<double, std::size_t>> skipped;  // (enroll prob, index)
    for (std::size_t i = 0; i < n; ++i) {
        const double p = logistic(scenario.enroll_intercept +
                                  dot(scenario.enroll_coeffs, registry[i].covariates));
        if (rng.next_unit() < p)
            eligible.push_back(i);
        else
            skipped.emplace_back(p, i);
    }
    // Too few volunteers: top up deterministically with the most enrollable.
    if (eligible.size() < n_trial) {
        std::sort(skipped.begin(), skipped.end(),
                  [&](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return registry[a.second].id < registry[b.second].id;
                  });
        for (std::size_t i = 0; eligible.size() < n_trial; ++i)
            eligible.push_back(skipped[i].second);
    }
    // Random subset of the eligible, randomized 1:1 by position.
    for (std::size_t i = eligible.size() - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i + 1));
        std::swap(eligible[i], eligible[j]);
    }
    std::vector<char> in_trial(n, 0);
    for (std::size_t i = 0; i < n_trial; ++i) in_trial[eligible[i]] = 1;

    EnrollResult res;
    const std::size_t n_treat = n_trial / 2;
    for (std::size_t i = 0; i < n_trial; ++i) {
        Subject s = registry[eligible[i]];
        s.group = i < n_treat ? Group::treatment : Group::control;
        (i < n_treat ? res.treatment : res.control).push_back(std::move(s));
    }

    // Propensity model: trial membership on covariates over the full registry.
    std::vector<char> y(in_trial.begin(), in_trial.end());
    const LogisticFit prop = fit_logistic(registry, y);
    res.propensity_fallback = !prop.converged;

    // Greedy nearest-neighbor matching without replacement; several passes over
    // the trial when n_external exceeds n_trial.
    std::vector<Subject> externals;
    externals.reserve(n_external);
    if (!res.propensity_fallback) {
        std::vector<double> ps(n);
        for (std::size_t i = 0; i < n; ++i) {
            double eta = prop.beta[0];
            for (std::size_t j = 0; j < k; ++j)
                eta += prop.beta[j + 1] * registry[i].covariates[j];
            ps[i] = logistic(eta);
        }
        // trial subjects in descending propensity (ties by id) for determinism
        std::vector<std::size_t> order(eligible.begin(), eligible.begin() + n_trial);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (ps[a] != ps[b]) return ps[a] > ps[b];
            return registry[a].id < registry[b].id;
        });
        std::set<std::pair<double, long>> pool;  // (propensity, id)
        std::map<long, std::size_t> id_to_index;
        for (std::size_t i = 0; i < n; ++i)
            if (!in_trial[i]) {
                pool.emplace(ps[i], registry[i].id);
                id_to_index[registry[i].id] = i;
            }
        while (externals.size() < n_external) {
            for (std::size_t t : order) {
                if (externals.size() == n_external) break;
                if (pool.empty())
                    throw std::runtime_error("enroll_and_match: matching pool exhausted");
                const auto key =
                    std::make_pair(ps[t], std::numeric_limits<long>::min());
                auto hi = pool.lower_bound(key);
                auto best = pool.end();
                if (hi != pool.end()) best = hi;
                if (hi != pool.begin()) {
                    auto lo = std::prev(hi);
                    if (best == pool.end())
                        best = lo;
                    else {
                        const double d_hi = std::fabs(best->first - ps[t]);
                        const double d_lo = std::fabs(lo->first - ps[t]);
                        if (d_lo < d_hi || (d_lo == d_hi && lo->second < best->second))
                            best = lo;
                    }
                }
                Subject s = registry[id_to_index[best->second]];
                s.group = Group::rwd;
                externals.push_back(std::move(s));
                pool.erase(best);
            }
        }
    } else {
        // Euclidean fallback on raw covariates; trial processed by ascending id.
        std::vector<std::size_t> order(eligible.begin(), eligible.begin() + n_trial);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return registry[a].id < registry[b].id;
        });
        std::vector<std::size_t> pool;
        for (std::size_t i = 0; i < n; ++i)
            if (!in_trial[i]) pool.push_back(i);
        while (externals.size() < n_external) {
            for (std::size_t t : order) {
                if (externals.size() == n_external) break;
                if (pool.empty())
                    throw std::runtime_error("enroll_and_match: matching pool exhausted");
                std::size_t best = 0;
                double best_d = std::numeric_limits<double>::infinity();
                for (std::size_t c = 0; c < pool.size(); ++c) {
                    double d = 0.0;
                    for (std::size_t j = 0; j < k; ++j) {
                        const double diff = registry[pool[c]].covariates[j] -
                                            registry[t].covariates[j];
                        d += diff * diff;
                    }
                    if (d < best_d ||
                        (d == best_d && registry[pool[c]].id < registry[pool[best]].id)) {
                        best_d = d;
                        best = c;
                    }
                }
                Subject s = registry[pool[best]];
                s.group = Group::rwd;
                externals.push_back(std::move(s));
                pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
            }
        }
    }
    res.externals = std::move(externals);
    return res;
}

void simulate_outcomes(std::vector<Subject>& subjects, const SurvivalScenario& scenario,
                       Substream& rng) {
    scenario.validate();
    check_covariates(subjects, scenario.cox_coeffs.size(), "simulate_outcomes");
    for (Subject& s : subjects) {
        const double theta = s.group == Group::treatment  ? scenario.theta_T
                             : s.group == Group::rwd      ? scenario.theta_R
                                                          : 1.0;
        const double risk = theta * std::exp(dot(scenario.cox_coeffs, s.covariates));
        const double u = rng.next_unit();
        const double cum = -std::log(u) / risk;  // cumulative baseline hazard at t
        if (scenario.baseline.family == BaselineSpec::Family::exponential)
            s.time = cum / scenario.baseline.lambda;
        else
            s.time = std::pow(cum, 1.0 / scenario.baseline.shape) / scenario.baseline.lambda;
        s.event = true;
    }
}

CensorResult administrative_censor(std::vector<Subject> subjects, int target_events,
                                   double registry_followup) {
    if (target_events < 1)
        throw std::invalid_argument("administrative_censor: target_events must be >= 1");
    if (!(registry_followup > 0.0))
        throw std::invalid_argument("administrative_censor: registry_followup must be > 0");

    struct Ref {
        double time;
        long id;
        std::size_t index;
    };
    std::vector<Ref> trial_events;
    double max_trial_time = -std::numeric_limits<double>::infinity();
    bool any_trial = false;
    for (std::size_t i = 0; i < subjects.size(); ++i) {
        const Subject& s = subjects[i];
        if (s.group == Group::rwd) continue;
        any_trial = true;
        max_trial_time = std::max(max_trial_time, s.time);
        if (s.event) trial_events.push_back({s.time, s.id, i});
    }
    if (!any_trial)
        throw std::invalid_argument("administrative_censor: no trial subjects");
    std::sort(trial_events.begin(), trial_events.end(), [](const Ref& a, const Ref& b) {
        if (a.time != b.time) return a.time < b.time;
        return a.id < b.id;
    });

    CensorResult res;
    const std::size_t target = static_cast<std::size_t>(target_events);
    res.under_powered = trial_events.size() < target;
    const std::size_t keep = std::min(target, trial_events.size());
    res.cutoff = res.under_powered ? max_trial_time : trial_events[keep - 1].time;

    // Events ranked past the cutoff become administrative censorings.
    for (std::size_t r = keep; r < trial_events.size(); ++r) {
        Subject& s = subjects[trial_events[r].index];
        s.time = res.cutoff;
        s.event = false;
    }
    for (Subject& s : subjects) {
        if (s.group == Group::rwd) {
            const double lim = std::min(res.cutoff, registry_followup);
            if (s.time > lim) {
                s.time = lim;
                s.event = false;
            }
        } else if (s.time > res.cutoff) {
            s.time = res.cutoff;
            s.event = false;
        }
    }
    res.subjects = std::move(subjects);
    return res;
}

CoxFit cox_fit(const std::vector<Subject>& subjects, bool adjust_covariates) {
    if (subjects.empty()) throw std::invalid_argument("cox_fit: no subjects");
    const std::size_t k = subjects.front().covariates.size();
    check_covariates(subjects, k, "cox_fit");
    const int p = 2 + (adjust_covariates ? static_cast<int>(k) : 0);

    struct Row {
        double time;
        bool event;
        long id;
        std::vector<double> x;
    };
    std::vector<Row> rows;
    rows.reserve(subjects.size());
    std::set<double> event_times;
    for (const Subject& s : subjects) {
        Row r;
        r.time = s.time;
        r.event = s.event;
        r.id = s.id;
        r.x.assign(static_cast<std::size_t>(p), 0.0);
        r.x[0] = s.group == Group::treatment ? 1.0 : 0.0;
        r.x[1] = s.group == Group::rwd ? 1.0 : 0.0;
        if (adjust_covariates)
            for (std::size_t j = 0; j < k; ++j) r.x[2 + j] = s.covariates[j];
        if (s.event) event_times.insert(s.time);
        rows.push_back(std::move(r));
    }
    if (event_times.size() < 2)
        throw std::invalid_argument("cox_fit: fewer than 2 distinct event times");
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.time != b.time) return a.time < b.time;
        return a.id < b.id;
    });
    const long n = static_cast<long>(rows.size());

    // One sweep of the Breslow partial likelihood: walk times descending,
    // growing the risk-set sums, and absorb each tied event block at once.
    // grad/info may be null for a likelihood-only evaluation. Extended
    // precision keeps the accumulated gradient meaningful at the 1e-8
    // convergence tolerance even for 10^4-subject datasets, where plain
    // double round-off in the running sums reaches that order.
    auto pass = [&](const std::vector<double>& beta, std::vector<double>* grad,
                    std::vector<double>* info) {
        long double logl = 0.0L;
        std::vector<long double> acc_grad(grad ? static_cast<std::size_t>(p) : 0, 0.0L);
        std::vector<long double> acc_info(info ? static_cast<std::size_t>(p * p) : 0, 0.0L);
        long double s0 = 0.0L;
        std::vector<long double> s1(static_cast<std::size_t>(p), 0.0L);
        std::vector<long double> s2(static_cast<std::size_t>(p * p), 0.0L);
        std::vector<long double> mu(static_cast<std::size_t>(p));
        long i = n - 1;
        while (i >= 0) {
            const double t = rows[i].time;
            long j = i;
            while (j >= 0 && rows[j].time == t) {
                const Row& r = rows[j];
                const double eta = std::min(dot(beta, r.x), 600.0);
                const long double w = std::exp(static_cast<long double>(eta));
                s0 += w;
                for (int a = 0; a < p; ++a) {
                    s1[a] += w * r.x[a];
                    if (info)
                        for (int b = 0; b <= a; ++b) s2[a * p + b] += w * r.x[a] * r.x[b];
                }
                --j;
            }
            int d = 0;
            std::vector<double> s(static_cast<std::size_t>(p), 0.0);
            for (long m = j + 1; m <= i; ++m)
                if (rows[m].event) {
                    ++d;
                    for (int a = 0; a < p; ++a) s[a] += rows[m].x[a];
                }
            if (d > 0) {
                logl += static_cast<long double>(dot(s, beta)) - d * std::log(s0);
                for (int a = 0; a < p; ++a) mu[a] = s1[a] / s0;
                if (grad)
                    for (int a = 0; a < p; ++a) acc_grad[a] += s[a] - d * mu[a];
                if (info)
                    for (int a = 0; a < p; ++a)
                        for (int b = 0; b <= a; ++b)
                            acc_info[a * p + b] += d * (s2[a * p + b] / s0 - mu[a] * mu[b]);
            }
            i = j;
        }
        if (grad)
            for (int a = 0; a < p; ++a) (*grad)[a] = static_cast<double>(acc_grad[a]);
        if (info) {
            for (int a = 0; a < p; ++a)
                for (int b = 0; b <= a; ++b)
                    (*info)[a * p + b] = static_cast<double>(acc_info[a * p + b]);
            for (int a = 0; a < p; ++a)
                for (int b = a + 1; b < p; ++b) (*info)[a * p + b] = (*info)[b * p + a];
        }
        return static_cast<double>(logl);
    };

    CoxFit fit;
    std::vector<double> beta(static_cast<std::size_t>(p), 0.0);
    std::vector<double> grad(static_cast<std::size_t>(p)), info(static_cast<std::size_t>(p * p));
    for (int iter = 0;; ++iter) {
        const double logl = pass(beta, &grad, &info);
        std::vector<double> l = info;
        const int bad = cholesky_factor(l, p);
        // a singular information matrix at the start is a design defect, even
        // when the gradient happens to vanish there (e.g. a constant column)
        if (bad >= 0 && iter == 0)
            throw std::runtime_error("cox_fit: rank-deficient design matrix (column " +
                                     std::to_string(bad) + ")");
        if (max_abs(grad) <= 1e-8) {
            fit.converged = true;
            break;
        }
        if (iter == 25) break;      // iteration budget exhausted
        if (bad >= 0) break;        // lost rank mid-iteration: report the last iterate
        const std::vector<double> step = cholesky_solve(l, p, grad);
        double scale = 1.0;
        bool accepted = false;
        std::vector<double> cand(static_cast<std::size_t>(p));
        for (int h = 0; h < 31; ++h) {
            for (int a = 0; a < p; ++a) cand[a] = beta[a] + scale * step[a];
            const double cl = pass(cand, nullptr, nullptr);
            if (std::isfinite(cl) && cl >= logl - 1e-10) {
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if (!accepted) break;
        beta = cand;
        ++fit.iterations;
        if (max_abs(beta) > 50.0) break;  // monotone likelihood (separation)
    }
    fit.coef = beta;

    pass(beta, &grad, &info);  // information at the reported iterate
    std::vector<double> l = info;
    if (cholesky_factor(l, p) < 0) {
        fit.covariance = cholesky_inverse(l, p);
    } else {
        fit.covariance.assign(static_cast<std::size_t>(p),
                              std::vector<double>(static_cast<std::size_t>(p), 0.0));
        fit.converged = false;
    }
    return fit;
}

SummaryStats to_summary(const CoxFit& fit) {
    if (!fit.converged) throw std::runtime_error("to_summary: Cox fit did not converge");
    if (fit.coef.size() < 2 || fit.covariance.size() < 2 || fit.covariance[0].size() < 2 ||
        fit.covariance[1].size() < 2)
        throw std::invalid_argument(
            "to_summary: fit must carry treatment and RWD coefficients");
    const double v11 = fit.covariance[0][0];
    const double v22 = fit.covariance[1][1];
    if (!(v11 > 0.0) || !(v22 > 0.0))
        throw std::runtime_error("to_summary: non-positive coefficient variance");
    SummaryStats s;
    s.y1 = fit.coef[0];
    s.y2 = fit.coef[1];
    s.se_y1 = std::sqrt(v11);
    s.se_y2 = std::sqrt(v22);
    const double cap = 1.0 - 1e-10;
    s.rho = std::clamp(fit.covariance[0][1] / (s.se_y1 * s.se_y2), -cap, cap);
    s.validate();
    return s;
}

namespace {

SummaryStats run_pipeline(const SurvivalScenario& sc, Substream& rng) {
    const std::vector<Subject> registry = generate_registry(sc.n_registry, sc, rng);
    EnrollResult enrolled = enroll_and_match(registry, sc, rng);
    std::vector<Subject> all;
    all.reserve(enrolled.treatment.size() + enrolled.control.size() +
                enrolled.externals.size());
    for (auto* part : {&enrolled.treatment, &enrolled.control, &enrolled.externals})
        for (Subject& s : *part) all.push_back(std::move(s));
    simulate_outcomes(all, sc, rng);
    CensorResult cens =
        administrative_censor(std::move(all), sc.target_events, sc.registry_followup);
    // covariate-adjusted, so the group coefficients estimate the conditional
    // log hazard ratios log(theta_T) and log(theta_R) consistently
    return to_summary(cox_fit(cens.subjects, true));
}

}  // namespace

std::vector<SurvivalSweepRow> survival_oc(const SurvivalScenario& base,
                                          const DesignParams& analysis,
                                          const std::vector<double>& log_theta_T_values,
                                          const std::vector<double>& log_theta_R_values,
                                          const std::vector<MethodSpec>& methods, long n_reps,
                                          const RngPolicy& policy) {
    base.validate();
    analysis.validate();
    if (log_theta_T_values.empty() || log_theta_R_values.empty())
        throw std::invalid_argument("survival_oc: grids must be non-empty");
    if (methods.empty()) throw std::invalid_argument("survival_oc: no methods given");
    if (n_reps < 100)
        throw std::invalid_argument("survival_oc: n_reps must be at least 100");

    std::vector<SurvivalSweepRow> out;
    out.reserve(log_theta_T_values.size() * log_theta_R_values.size() * methods.size());
    for (std::size_t a = 0; a < log_theta_T_values.size(); ++a) {
        for (std::size_t b = 0; b < log_theta_R_values.size(); ++b) {
            SurvivalScenario sc = base;
            sc.theta_T = std::exp(log_theta_T_values[a]);
            sc.theta_R = std::exp(log_theta_R_values[b]);
            const std::uint64_t cell =
                policy.scenario_index + a * log_theta_R_values.size() + b;

            const auto totals = detail::run_chunked(
                n_reps, static_cast<int>(methods.size()), policy.threads,
                [&](long lo, long hi, std::vector<detail::Accum>& acc) {
                    for (long rep = lo; rep < hi; ++rep) {
                        Substream rng(policy.master_seed, cell,
                                      static_cast<std::uint64_t>(rep));
                        SummaryStats stats;
                        bool ok = true;
                        try {
                            stats = run_pipeline(sc, rng);
                        } catch (const std::exception&) {
                            ok = false;
                        }
                        if (!ok) {
                            for (auto& a0 : acc) ++a0.failed;
                            continue;
                        }
                        for (std::size_t m = 0; m < methods.size(); ++m) {
                            try {
                                const TestOutcome o = apply_method(methods[m], stats, analysis);
                                const auto it = o.extras.find("alpha0");
                                acc[m].add(o.reject, o.borrowed, o.estimate,
                                           it == o.extras.end() ? 0.0 : it->second);
                            } catch (const std::exception&) {
                                ++acc[m].failed;
                            }
                        }
                    }
                });

            for (std::size_t m = 0; m < methods.size(); ++m) {
                OCResult r = detail::make_result(methods[m].method, totals[m], n_reps,
                                                 log_theta_T_values[a], policy.master_seed);
                if (totals[m].failed * 100 > n_reps) {
                    r.error = "more than 1% of replicates failed";
                    const double nan = std::numeric_limits<double>::quiet_NaN();
                    r.reject_rate = r.borrow_rate = r.bias = r.mean_alpha0 = nan;
                    r.mc_se_reject = r.mc_se_bias = nan;
                }
                out.push_back({log_theta_T_values[a], log_theta_R_values[b], std::move(r)});
            }
        }
    }
    return out;
}

std::vector<Subject> read_subjects_csv(const std::string& path) {
    const CsvTable t = read_csv(path);
    const std::vector<std::string> fixed = {"id", "group", "time", "event"};
    if (t.columns.size() < fixed.size())
        throw std::runtime_error("read_subjects_csv: missing columns in " + path);
    for (std::size_t i = 0; i < fixed.size(); ++i)
        if (t.columns[i] != fixed[i])
            throw std::runtime_error("read_subjects_csv: expected column '" + fixed[i] +
                                     "', found '" + t.columns[i] + "'");
    const std::size_t k = t.columns.size() - fixed.size();
    for (std::size_t j = 0; j < k; ++j) {
        const std::string want = "cov_" + std::to_string(j + 1);
        if (t.columns[fixed.size() + j] != want)
            throw std::runtime_error("read_subjects_csv: expected column '" + want +
                                     "', found '" + t.columns[fixed.size() + j] + "'");
    }
    std::vector<Subject> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        Subject s;
        try {
            s.id = std::stol(row[0]);
            if (row[1] == "treatment")
                s.group = Group::treatment;
            else if (row[1] == "control")
                s.group = Group::control;
            else if (row[1] == "rwd")
                s.group = Group::rwd;
            else
                throw std::runtime_error("unknown group '" + row[1] + "'");
            s.time = std::stod(row[2]);
            if (row[3] == "1")
                s.event = true;
            else if (row[3] == "0")
                s.event = false;
            else
                throw std::runtime_error("event must be 0 or 1, found '" + row[3] + "'");
            for (std::size_t j = 0; j < k; ++j)
                s.covariates.push_back(std::stod(row[fixed.size() + j]));
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string("read_subjects_csv: bad row: ") + e.what());
        }
        out.push_back(std::move(s));
    }
    return out;
}

void write_subjects_csv(const std::string& path, const std::vector<Subject>& subjects) {
    CsvTable t;
    const std::size_t k = subjects.empty() ? 0 : subjects.front().covariates.size();
    t.columns = {"id", "group", "time", "event"};
    for (std::size_t j = 0; j < k; ++j) t.columns.push_back("cov_" + std::to_string(j + 1));
    for (const Subject& s : subjects) {
        if (s.covariates.size() != k)
            throw std::invalid_argument("write_subjects_csv: covariate length mismatch");
        std::vector<std::string> row = {std::to_string(s.id), group_name(s.group),
                                        format_double(s.time), s.event ? "1" : "0"};
        for (double c : s.covariates) row.push_back(format_double(c));
        t.rows.push_back(std::move(row));
    }
    write_csv(path, t);
}

}  // namespace hybrid
