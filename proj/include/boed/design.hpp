#pragma once

#include <Eigen/Dense>

#include <vector>

namespace boed {

/**
 * A sensor configuration: n rows of k coordinates. For network designs k = 1
 * (distance upstream along the point's path) and path[i] indexes the path
 * list of the design space; path is empty for planar designs.
 */
struct Design {
    Eigen::MatrixXd coords;
    std::vector<int> path;

    Eigen::Index points() const { return coords.rows(); }
    Eigen::Index dims() const { return coords.cols(); }
};

inline bool operator==(const Design& a, const Design& b) {
    return a.path == b.path && a.coords.rows() == b.coords.rows() && a.coords.cols() == b.coords.cols() &&
           a.coords == b.coords;
}

}  // namespace boed
