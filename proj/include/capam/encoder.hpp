#pragma once

#include <string>

#include "capam/params.hpp"
#include "capam/tape.hpp"
#include "capam/task_graph.hpp"

namespace capam {

enum class Activation { Relu, Identity };

// Graph-capsule encoder: linear lift of the node features, L_e capsule
// layers combining Laplacian powers k = 0..K with element-wise statistical
// moments p = 1..P, then an affine projection back to width h.
struct EncoderConfig {
  int feat_dim = 3;   // 3, or 4 with the workload feature switch
  int h0 = 128;       // lift width
  int h = 128;        // node embedding width
  int K = 2;          // degree of the convolutional filter
  int P = 3;          // highest statistical-moment order
  int L_e = 1;        // capsule layers
  Activation act = Activation::Relu;

  // Layer input width: h0 for the first layer, h*P afterwards.
  int layer_input(int layer) const { return layer == 1 ? h0 : h * P; }
};

// Registers enc.* parameters (uniform +-1/sqrt(fan_in) init).
void register_encoder_params(ParamStore& store, const EncoderConfig& cfg, Rng& rng);

// Forward pass over the tape; returns the node id of the N x h embeddings.
int encode(Tape& tape, ParamBinder& bind, const TaskGraph& graph,
           const EncoderConfig& cfg);

}  // namespace capam
