#include "trafficlab/equilibrium.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace trafficlab {

namespace {

constexpr int kMaxEnumerationPeriod = 12;
constexpr int kCertificateCap = 4096;
constexpr double kInf = std::numeric_limits<double>::infinity();

// One simulation step shared by every rollout in this module. Queue order
// [W,N,E,S]; phase 0 serves W/E, phase 2 serves N/S; departures leave
// before arrivals land; internal transfers land the same step.
struct InstanceSim {
    const DeterministicInstance &inst;
    std::vector<std::array<double, 4>> q;
    std::vector<int> phase;
    int64_t t = 0;

    explicit InstanceSim(const DeterministicInstance &instance)
        : inst(instance),
          q(instance.intersections, {0, 0, 0, 0}),
          phase(instance.intersections, 0) {}

    void step(const std::vector<CyclicPolicy> &policies) {
        const double d = inst.greenRate;
        std::vector<std::array<double, 4>> dep(q.size(), {0, 0, 0, 0});
        for (size_t n = 0; n < q.size(); ++n) {
            if (phase[n] == 0) {
                dep[n][0] = std::min(q[n][0], d);
                dep[n][2] = std::min(q[n][2], d);
            } else if (phase[n] == 2) {
                dep[n][1] = std::min(q[n][1], d);
                dep[n][3] = std::min(q[n][3], d);
            }
            for (int i = 0; i < 4; ++i) q[n][i] -= dep[n][i];
        }
        if (inst.intersections == 1) {
            q[0][0] += inst.flow1Rate;
            q[0][2] += inst.flow1Rate;
            q[0][1] += inst.flow2Rate;
            q[0][3] += inst.flow2Rate;
        } else {
            q[0][0] += inst.flow1Rate;             // west boundary of int 0
            q[1][2] += inst.flow1Rate;             // east boundary of int 1
            q[0][1] += inst.flow2Rate;
            q[0][3] += inst.flow2Rate;
            q[1][1] += inst.flow2Rate;
            q[1][3] += inst.flow2Rate;
            q[0][2] += dep[1][2];                  // westbound from int 1
            q[1][0] += dep[0][0];                  // eastbound from int 0
        }
        for (size_t n = 0; n < q.size(); ++n)
            phase[n] = (phase[n] + policies[n].actionAt(t)) % 4;
        ++t;
    }

    std::vector<double> snapshot() const {
        std::vector<double> out;
        out.reserve(q.size() * 4);
        for (const auto &row : q)
            for (double v : row) out.push_back(v);
        return out;
    }

    double stepUtility() const {
        double f = 0;
        for (const auto &row : q)
            for (double v : row) f += v * v;
        return -f;
    }
};

void checkPolicies(const DeterministicInstance &inst,
                   const std::vector<CyclicPolicy> &policies) {
    if (static_cast<int>(policies.size()) != inst.intersections)
        throw InvalidArgument("need one policy per intersection");
    for (const auto &p : policies) {
        if (p.actions.empty()) throw InvalidArgument("policy must be nonempty");
        for (int a : p.actions)
            if (a != 0 && a != 1) throw InvalidArgument("actions must be 0 or 1");
    }
}

int64_t lcm64(int64_t a, int64_t b) { return a / std::gcd(a, b) * b; }

// Runs period-boundary certificates: either the state repeats exactly
// (periodic orbit) or the per-period change locks to a fixed nonzero vector
// (linear growth forever). Returns {converged, drift at the decision point}.
struct CertificateResult {
    bool periodic = false;
    bool certified = true;
    std::vector<double> drift;
    InstanceSim sim;  // positioned at the decision boundary
};

CertificateResult runCertificates(const DeterministicInstance &inst,
                                  const std::vector<CyclicPolicy> &policies,
                                  int64_t period) {
    CertificateResult out{false, true, {}, InstanceSim(inst)};
    std::vector<double> prev = out.sim.snapshot();
    std::vector<double> prevDiff, prevPrevDiff;
    for (int k = 0; k < kCertificateCap; ++k) {
        for (int64_t s = 0; s < period; ++s) out.sim.step(policies);
        std::vector<double> cur = out.sim.snapshot();
        std::vector<double> diff(cur.size());
        bool zero = true;
        for (size_t i = 0; i < cur.size(); ++i) {
            diff[i] = cur[i] - prev[i];
            if (diff[i] != 0.0) zero = false;
        }
        if (zero) {
            out.periodic = true;
            out.drift = std::move(diff);
            return out;
        }
        if (!prevDiff.empty() && !prevPrevDiff.empty() && diff == prevDiff &&
            diff == prevPrevDiff) {
            out.drift = std::move(diff);
            return out;
        }
        prevPrevDiff = std::move(prevDiff);
        prevDiff = diff;
        prev = std::move(cur);
    }
    // cap reached (possible only for awkward irrational-ish rates):
    // classify by the sign of the last observed change
    out.certified = false;
    out.drift = std::move(prevDiff);
    return out;
}

}  // namespace

std::string CyclicPolicy::str() const {
    std::string s = "(";
    for (size_t i = 0; i < actions.size(); ++i) {
        if (i) s += ",";
        s += actions[i] ? "1" : "0";
    }
    return s + ")";
}

int jointPeriod(const CyclicPolicy &policy) {
    int p = policy.period();
    if (p <= 0) throw InvalidArgument("policy must be nonempty");
    int s = std::accumulate(policy.actions.begin(), policy.actions.end(), 0) % 4;
    return s == 0 ? p : p * (4 / std::gcd(s, 4));
}

int phaseAt(const CyclicPolicy &policy, int64_t t) {
    int p = policy.period();
    int64_t full = t / p;
    int rem = static_cast<int>(t % p);
    int64_t sum = full * std::accumulate(policy.actions.begin(),
                                         policy.actions.end(), int64_t{0});
    for (int i = 0; i < rem; ++i) sum += policy.actions[i];
    return static_cast<int>(sum % 4);
}

GreenCount countGreens(const CyclicPolicy &policy) {
    GreenCount g;
    g.jointPeriod = jointPeriod(policy);
    int phase = 0;
    for (int t = 0; t < g.jointPeriod; ++t) {
        if (phase == 0) ++g.flow1;
        if (phase == 2) ++g.flow2;
        phase = (phase + policy.actions[t % policy.period()]) % 4;
    }
    return g;
}

std::vector<InstanceStep> simulateCycle(const DeterministicInstance &instance,
                                        const std::vector<CyclicPolicy> &policies,
                                        int horizon) {
    checkPolicies(instance, policies);
    if (horizon < 0) throw InvalidArgument("horizon must be >= 0");
    InstanceSim sim(instance);
    std::vector<InstanceStep> traj;
    traj.reserve(horizon);
    for (int t = 0; t < horizon; ++t) {
        traj.push_back(InstanceStep{sim.q});
        sim.step(policies);
    }
    return traj;
}

StabilityReport isStable(const DeterministicInstance &instance,
                         const CyclicPolicy &policy) {
    std::vector<CyclicPolicy> policies(instance.intersections, policy);
    checkPolicies(instance, policies);
    StabilityReport report;
    GreenCount g = countGreens(policy);
    report.jointPeriod = g.jointPeriod;
    report.greenSlots = {g.flow1, g.flow2};

    CertificateResult cert =
        runCertificates(instance, policies, g.jointPeriod);
    report.certified = cert.certified;
    report.stable = cert.periodic;
    for (size_t i = 0; i < cert.drift.size(); ++i) {
        int flow = (i % 4 == 0 || i % 4 == 2) ? 0 : 1;
        report.flowDrift[flow] = std::max(report.flowDrift[flow], cert.drift[i]);
    }
    if (!cert.certified)
        report.stable = *std::max_element(cert.drift.begin(), cert.drift.end()) <= 0;
    return report;
}

LongRunResult measureLongRun(const DeterministicInstance &instance,
                             const std::vector<CyclicPolicy> &policies) {
    checkPolicies(instance, policies);
    int64_t period = 1;
    for (const auto &p : policies) period = lcm64(period, jointPeriod(p));

    CertificateResult cert = runCertificates(instance, policies, period);
    LongRunResult out;
    out.certified = cert.certified;
    bool grew = false;
    for (double d : cert.drift)
        if (d > 0) grew = true;
    out.bounded = cert.periodic || (!cert.certified && !grew);
    if (!out.bounded) {
        out.meanGroupUtility = -kInf;
        return out;
    }
    // average the utility over one full period at the orbit
    double sum = 0;
    for (int64_t s = 0; s < period; ++s) {
        sum += cert.sim.stepUtility();
        cert.sim.step(policies);
    }
    out.meanGroupUtility = sum / static_cast<double>(period);
    return out;
}

std::vector<CyclicPolicy> enumeratePolicies(int maxPeriod) {
    if (maxPeriod < 1) throw InvalidArgument("maxPeriod must be >= 1");
    if (maxPeriod > kMaxEnumerationPeriod)
        throw InvalidArgument("maxPeriod above enumeration bound " +
                              std::to_string(kMaxEnumerationPeriod));
    std::vector<CyclicPolicy> out;
    for (int n = 1; n <= maxPeriod; ++n) {
        std::set<std::vector<int>> seen;
        for (uint32_t bits = 0; bits < (1u << n); ++bits) {
            std::vector<int> seq(n);
            for (int i = 0; i < n; ++i) seq[i] = (bits >> i) & 1;
            std::vector<int> canon = seq;
            for (int r = 1; r < n; ++r) {
                std::rotate(seq.begin(), seq.begin() + 1, seq.end());
                if (seq < canon) canon = seq;
            }
            seen.insert(std::move(canon));
        }
        for (const auto &canon : seen) out.push_back(CyclicPolicy{canon});
    }
    return out;
}

DeviationReport checkUnilateralDeviation(const DeterministicInstance &instance,
                                         const std::array<CyclicPolicy, 2> &joint,
                                         int maxPeriod) {
    if (instance.intersections != 2)
        throw InvalidArgument("deviation check needs a 2-intersection instance");
    std::vector<CyclicPolicy> base{joint[0], joint[1]};
    LongRunResult baseline = measureLongRun(instance, base);

    DeviationReport report;
    report.jointStable = baseline.bounded;
    report.baselineUtility = baseline.meanGroupUtility;
    report.bestDelta = -kInf;

    std::vector<CyclicPolicy> candidates = enumeratePolicies(maxPeriod);
    for (int agent = 0; agent < 2; ++agent) {
        for (const auto &dev : candidates) {
            std::vector<CyclicPolicy> profile = base;
            profile[agent] = dev;
            LongRunResult r = measureLongRun(instance, profile);
            DeviationOutcome outcome;
            outcome.agent = agent;
            outcome.policy = dev;
            outcome.utility = r.meanGroupUtility;
            const double guard =
                1e-9 * (1.0 + std::abs(report.baselineUtility));
            outcome.improving =
                std::isfinite(r.meanGroupUtility) &&
                r.meanGroupUtility > report.baselineUtility + guard;
            if (outcome.improving) ++report.improvingCount;
            if (std::isfinite(r.meanGroupUtility))
                report.bestDelta = std::max(
                    report.bestDelta, r.meanGroupUtility - report.baselineUtility);
            report.outcomes.push_back(std::move(outcome));
        }
    }
    return report;
}

std::vector<FrontierRow> nashFeasibilityFrontier(
    const DeterministicInstance &instance, int maxPeriod) {
    if (maxPeriod < 1) throw InvalidArgument("maxPeriod must be >= 1");
    if (maxPeriod > kMaxEnumerationPeriod)
        throw InvalidArgument("maxPeriod above enumeration bound " +
                              std::to_string(kMaxEnumerationPeriod));
    std::vector<FrontierRow> rows;
    for (int L = 1; L <= maxPeriod; ++L) {
        FrontierRow row;
        row.cycleLength = L;
        for (uint32_t bits = 0; bits < (1u << L); ++bits) {
            int sum = __builtin_popcount(bits);
            if (sum % 4 != 0) continue;  // light cycle must close in L steps
            CyclicPolicy pol;
            pol.actions.resize(L);
            for (int i = 0; i < L; ++i) pol.actions[i] = (bits >> i) & 1;
            GreenCount g = countGreens(pol);
            int minGreen = std::min(g.flow1, g.flow2);
            if (row.bestPolicy.actions.empty()) row.bestPolicy = pol;
            if (static_cast<long long>(minGreen) * row.ratioDen >
                row.ratioNum * static_cast<long long>(L)) {
                long long num = minGreen, den = L;
                long long common = std::gcd(num, den);
                row.ratioNum = num / common;
                row.ratioDen = den / common;
                row.bestGreen1 = g.flow1;
                row.bestGreen2 = g.flow2;
                row.bestPolicy = pol;
            }
        }
        row.ratio = static_cast<double>(row.ratioNum) /
                    static_cast<double>(row.ratioDen);
        row.maxArrivalRate = row.ratio * instance.greenRate;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string renderEquilibriumReport(const DeterministicInstance &instance,
                                    int maxPeriod, bool withDeviations) {
    std::ostringstream os;
    const double c = instance.flow1Rate;
    const double d = instance.greenRate;
    os << "deterministic instance: c=" << c << " (both flows), d=" << d
       << ", c/d=" << c / d << "\n\n";

    CyclicPolicy allOnes{{1}};
    DeterministicInstance single =
        DeterministicInstance::symmetric(1, c, d);
    StabilityReport always = isStable(single, allOnes);
    os << "always-switch policy (one green per flow every 4 steps):\n"
       << "  stable: " << (always.stable ? "yes" : "no")
       << "  per-period drift flow1=" << always.flowDrift[0]
       << " flow2=" << always.flowDrift[1] << "\n"
       << "  stability boundary: c/d <= 1/4 (4c <= d per cycle); here c/d="
       << c / d << (c <= d / 4 ? " <= 1/4" : " > 1/4") << "\n\n";

    os << "feasibility frontier (cycle length L: largest c/d some L-step\n"
       << "action string with a closed light cycle keeps both flows bounded):\n";
    auto rows = nashFeasibilityFrontier(single, maxPeriod);
    for (const auto &row : rows) {
        os << "  L=" << row.cycleLength << ": c/d <= " << row.ratioNum << "/"
           << row.ratioDen << " (greens " << row.bestGreen1 << "/"
           << row.bestGreen2 << " via " << row.bestPolicy.str() << ")"
           << ", max c = " << row.maxArrivalRate << "\n";
    }
    for (const auto &row : rows) {
        if (row.cycleLength == 5 && !(row.ratioNum == 1 && row.ratioDen == 2)) {
            os << "\nnote: a 5-step cycle is sometimes said to sustain c = d/2;"
               << " the enumeration finds the true bound at L=5 is "
               << row.ratioNum << "/" << row.ratioDen
               << " (5 steps accumulate 5c per flow against at most "
               << row.bestGreen1 << "d of service).\n";
        }
    }

    if (withDeviations) {
        DeterministicInstance pair{2, c, c, d};
        DeviationReport dev =
            checkUnilateralDeviation(pair, {allOnes, allOnes}, maxPeriod);
        os << "\ntwo-intersection line, both always-switch:\n"
           << "  joint policy stable: " << (dev.jointStable ? "yes" : "no") << "\n";
        if (dev.jointStable) {
            os << "  baseline mean group utility/step: " << dev.baselineUtility
               << "\n"
               << "  unilateral cyclic deviations enumerated (P<=" << maxPeriod
               << ", per agent): " << dev.outcomes.size() / 2 << "\n"
               << "  improving deviations: " << dev.improvingCount << "\n"
               << "  best finite utility delta: " << dev.bestDelta << "\n";
        } else {
            os << "  baseline unbounded; deviation comparison is vacuous at this"
               << " c/d\n";
        }
    }
    return os.str();
}

void writeFrontierCsv(const std::vector<FrontierRow> &rows,
                      const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "cycle_length,best_ratio_num,best_ratio_den,best_ratio,max_arrival_rate,"
           "green1,green2,policy\n";
    for (const auto &row : rows) {
        out << row.cycleLength << "," << row.ratioNum << "," << row.ratioDen
            << "," << row.ratio << "," << row.maxArrivalRate << ","
            << row.bestGreen1 << "," << row.bestGreen2 << ",\""
            << row.bestPolicy.str() << "\"\n";
    }
}

}  // namespace trafficlab
