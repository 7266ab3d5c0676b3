#ifndef TRAFFICLAB_EQUILIBRIUM_H
#define TRAFFICLAB_EQUILIBRIUM_H

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "trafficlab/errors.h"

namespace trafficlab {

// Fully deterministic single- or two-intersection instance with constant
// arrival rates per fed flow and constant departure rate under green.
// Rates are real-valued here so boundary ratios can be tested exactly;
// with integer or dyadic rates every computed queue value is exact in double.
struct DeterministicInstance {
    int intersections = 1;  // 1, or 2 in a west-east line
    double flow1Rate = 1.0; // west/east boundary queues, per step
    double flow2Rate = 1.0; // north/south boundary queues, per step
    double greenRate = 4.0; // departures per green step

    static DeterministicInstance symmetric(int intersections, double arrivalRate,
                                           double greenRate) {
        if (intersections != 1 && intersections != 2)
            throw InvalidArgument("instance supports 1 or 2 intersections");
        if (arrivalRate < 0 || greenRate <= 0)
            throw InvalidArgument("rates must satisfy c >= 0 and d > 0");
        return {intersections, arrivalRate, arrivalRate, greenRate};
    }
};

// A binary action sequence repeated forever.
struct CyclicPolicy {
    std::vector<int> actions;

    int period() const { return static_cast<int>(actions.size()); }
    int actionAt(int64_t t) const { return actions[t % actions.size()]; }
    std::string str() const;
};

// Steps until the (phase, position-in-policy) pair first recurs:
// P when the action sum is 0 mod 4, else P * 4/gcd(sum mod 4, 4).
int jointPeriod(const CyclicPolicy &policy);

// Light phase at step t when starting from phase 0 at t = 0.
int phaseAt(const CyclicPolicy &policy, int64_t t);

// Green step counts per flow over one joint period, starting from phase 0.
struct GreenCount {
    int jointPeriod = 0;
    int flow1 = 0;
    int flow2 = 0;
};
GreenCount countGreens(const CyclicPolicy &policy);

struct InstanceStep {
    std::vector<std::array<double, 4>> queues;  // state at start of the step
};

// Exact rollout; per-intersection policies; queues start empty, phases 0.
std::vector<InstanceStep> simulateCycle(const DeterministicInstance &instance,
                                        const std::vector<CyclicPolicy> &policies,
                                        int horizon);

struct StabilityReport {
    bool stable = false;
    int jointPeriod = 0;
    std::array<int, 2> greenSlots{0, 0};
    // measured per-period queue change per flow at steady state
    std::array<double, 2> flowDrift{0.0, 0.0};
    bool certified = true;  // false if the certificate loop hit its cap
};

// True iff every queue is non-increasing over one joint period from the
// periodic steady state, decided by rollout with exact certificates.
StabilityReport isStable(const DeterministicInstance &instance,
                         const CyclicPolicy &policy);

struct LongRunResult {
    bool bounded = false;
    double meanGroupUtility = 0.0;  // -inf when unbounded
    bool certified = true;
};

// Mean per-step group utility (-sum of squared queues) over one joint period
// at steady state; unbounded growth scores -infinity.
LongRunResult measureLongRun(const DeterministicInstance &instance,
                             const std::vector<CyclicPolicy> &policies);

// All cyclic policies of period <= maxPeriod, deduplicated by rotation
// (lexicographically smallest rotation kept). maxPeriod <= 12.
std::vector<CyclicPolicy> enumeratePolicies(int maxPeriod);

struct DeviationOutcome {
    int agent = 0;
    CyclicPolicy policy;
    double utility = 0.0;  // -inf when the deviation leaves queues unbounded
    bool improving = false;
};

struct DeviationReport {
    bool jointStable = false;
    double baselineUtility = 0.0;
    int improvingCount = 0;
    double bestDelta = 0.0;  // most positive utility - baseline over deviations
    std::vector<DeviationOutcome> outcomes;
};

// Brute-force every enumerated unilateral deviation on the 2-intersection
// instance, holding the other agent's policy fixed. Improvement must exceed
// a 1e-9 relative guard so behaviorally identical policies stated at
// different periods do not register as improvements through rounding.
DeviationReport checkUnilateralDeviation(const DeterministicInstance &instance,
                                         const std::array<CyclicPolicy, 2> &joint,
                                         int maxPeriod);

struct FrontierRow {
    int cycleLength = 0;      // actions per complete light cycle
    int bestGreen1 = 0;
    int bestGreen2 = 0;
    long long ratioNum = 0;   // best stabilizable c/d, as a reduced fraction
    long long ratioDen = 1;
    double ratio = 0.0;
    double maxArrivalRate = 0.0;  // ratio * d for this instance
    CyclicPolicy bestPolicy;
};

// For each light-cycle length L <= maxPeriod: the largest c/d some length-L
// action string with action sum = 0 mod 4 stabilizes for both flows.
std::vector<FrontierRow> nashFeasibilityFrontier(
    const DeterministicInstance &instance, int maxPeriod);

std::string renderEquilibriumReport(const DeterministicInstance &instance,
                                    int maxPeriod, bool withDeviations);
void writeFrontierCsv(const std::vector<FrontierRow> &rows,
                      const std::filesystem::path &path);

}  // namespace trafficlab

#endif
