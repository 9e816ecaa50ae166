#pragma once

#include "cat0/spaces.hpp"

namespace cat0 {

// Graph oracles for validating the closed-form metrics. They share no code
// with the distance routines in spaces.cpp and complex.cpp.

// Dijkstra on the tree ball of the given radius with every edge subdivided
// into pieces of length at most mesh. Edge points are snapped to the nearest
// subdivision node.
double tree_graph_distance(const WeightedTree& T, const TreePoint& p, const TreePoint& q, double radius, double mesh);

// Tree factor from the subdivided graph, combined with the height difference
// through the l2 product metric.
double product_graph_distance(const ProductSpace& X, const ProductPoint& p, const ProductPoint& q, double radius,
                              double mesh);

// d(x0, k x0) by Dijkstra over the orbit points of all elements with at most
// max_syllables syllables whose syllable values have word length at most
// syllable_radius. Orbit points sharing a piece copy are joined by the local
// metric of that piece; interval pieces and cone spokes are subdivided at
// mesh.
double complex_graph_distance(const FreeProductComplex& S, const GroupElement& k, int max_syllables,
                              int syllable_radius, double mesh);

}  // namespace cat0
