#ifndef TRAFFICLAB_OU_NOISE_H
#define TRAFFICLAB_OU_NOISE_H

#include "trafficlab/rng.h"

namespace trafficlab {

// Discrete Ornstein-Uhlenbeck process:
//   x <- x + theta * (mu - x) + sigma * N(0,1)
class OuNoise {
public:
    OuNoise(double theta, double mu, double sigma)
        : theta(theta), mu(mu), sigma(sigma) {}

    double sample(RngStream &rng) {
        x += theta * (mu - x) + sigma * rng.gauss();
        return x;
    }

    void reset() { x = 0.0; }
    double state() const { return x; }
    double scale() const { return sigma; }
    void setScale(double s) { sigma = s; }

private:
    double theta;
    double mu;
    double sigma;
    double x = 0.0;
};

}  // namespace trafficlab

#endif
