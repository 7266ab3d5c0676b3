#ifndef TRAFFICLAB_TYPES_H
#define TRAFFICLAB_TYPES_H

#include <array>
#include <cstdint>
#include <vector>

#include "trafficlab/errors.h"

namespace trafficlab {

// Queue index order is fixed: west, north, east, south.
enum QueueDir : int { kWest = 0, kNorth = 1, kEast = 2, kSouth = 3 };

// Light phases: 0 green flow 1 (west/east), 1 yellow flow 1,
// 2 green flow 2 (north/south), 3 yellow flow 2.
inline bool phaseServesEastWest(int phase) { return phase == 0; }
inline bool phaseServesNorthSouth(int phase) { return phase == 2; }

enum class RoadKind { Main, Branch };

struct RoadClass {
    RoadKind kind = RoadKind::Main;
    int passingRate = 16;   // vehicles crossing per green step
    int arrivalBound = 4;   // max external arrivals per step (bounded-uniform model)

    static RoadClass main() { return {RoadKind::Main, 16, 4}; }
    static RoadClass branch() { return {RoadKind::Branch, 4, 1}; }
};

enum class ArrivalMode { Bernoulli, BoundedUniform };

struct ArrivalModel {
    ArrivalMode mode = ArrivalMode::Bernoulli;
    double p1 = 0.9;  // east-west boundary roads
    double p2 = 0.3;  // north-south boundary roads
};

struct GridPos {
    int row = 0;
    int col = 0;
    bool operator==(const GridPos &) const = default;
};

struct IntersectionState {
    std::array<int, 4> queues{0, 0, 0, 0};
    int phase = 0;
};

struct GridTopology {
    int rows = 1;
    int cols = 1;
    std::vector<RoadClass> rowClass;  // east-west road of each row
    std::vector<RoadClass> colClass;  // north-south road of each column
    ArrivalModel arrival;
    bool travelDelay = false;  // internal transfers land one step late

    static GridTopology make(int rows, int cols,
                             RoadClass rowC = RoadClass::main(),
                             RoadClass colC = RoadClass::branch(),
                             ArrivalModel arrival = {}) {
        if (rows < 1 || cols < 1)
            throw InvalidArgument("grid dimensions must be >= 1");
        GridTopology t;
        t.rows = rows;
        t.cols = cols;
        t.rowClass.assign(rows, rowC);
        t.colClass.assign(cols, colC);
        t.arrival = arrival;
        return t;
    }

    int agentCount() const { return rows * cols; }
    int index(int r, int c) const { return r * cols + c; }
    GridPos pos(int n) const { return {n / cols, n % cols}; }
    bool inGrid(int r, int c) const { return r >= 0 && r < rows && c >= 0 && c < cols; }

    // grid-adjacent intersections of n, in [W,N,E,S] slot order; -1 if off-grid
    std::array<int, 4> neighbors(int n) const {
        GridPos p = pos(n);
        std::array<int, 4> out{-1, -1, -1, -1};
        if (inGrid(p.row, p.col - 1)) out[kWest] = index(p.row, p.col - 1);
        if (inGrid(p.row - 1, p.col)) out[kNorth] = index(p.row - 1, p.col);
        if (inGrid(p.row, p.col + 1)) out[kEast] = index(p.row, p.col + 1);
        if (inGrid(p.row + 1, p.col)) out[kSouth] = index(p.row + 1, p.col);
        return out;
    }

    // whether queue i of intersection n is fed from outside the grid
    bool boundaryFed(int n, int i) const {
        GridPos p = pos(n);
        switch (i) {
            case kWest: return p.col == 0;
            case kNorth: return p.row == 0;
            case kEast: return p.col == cols - 1;
            case kSouth: return p.row == rows - 1;
        }
        return false;
    }

    const RoadClass &queueRoad(int n, int i) const {
        GridPos p = pos(n);
        return (i == kWest || i == kEast) ? rowClass[p.row] : colClass[p.col];
    }

    int ewPassingRate(int n) const { return rowClass[pos(n).row].passingRate; }
    int nsPassingRate(int n) const { return colClass[pos(n).col].passingRate; }
};

struct NetworkState {
    std::vector<IntersectionState> intersections;
    int64_t time = 0;
};

}  // namespace trafficlab

#endif
