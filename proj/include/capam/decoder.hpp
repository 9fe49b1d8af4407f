#pragma once

#include <vector>

#include "capam/params.hpp"
#include "capam/simulator.hpp"
#include "capam/tape.hpp"

namespace capam {

// Context-conditioned multi-head attention decoder. The mission/robot context
// is projected to a query, attends over the node embeddings (keys/values),
// and the processed glimpse scores every task through a clipped tanh
// compatibility; infeasible tasks are masked to probability 0.
struct DecoderConfig {
  int h = 128;        // node embedding width (matches encoder h)
  int hq = 8;         // context width
  int heads = 8;      // h must be divisible by heads
  double clip = 10.0; // logit clipping constant

  int head_dim() const { return h / heads; }
};

// Fixed reference team size used to normalize the peer count.
inline constexpr double kPeerCountRef = 7.0;
inline constexpr double kMaxCapacity = 3.0;

// Five context feature groups, aggregated to a fixed width regardless of
// team size: elapsed time, decider capacity, decider location, mean peer
// destination, mean peer capacity, plus the normalized peer count.
std::vector<double> build_context(const ProblemInstance& inst, const SimState& state,
                                  int robot);

void register_decoder_params(ParamStore& store, const DecoderConfig& cfg, Rng& rng);

// Per-instance key/value projections of the embeddings (shared by every
// decision of the episode).
struct DecoderCache {
  int keys = -1;    // N x h
  int values = -1;  // N x h
};

DecoderCache project_embeddings(Tape& tape, ParamBinder& bind, int embeddings);

// Scaled dot-product attention for one query row; masked nodes are excluded
// from the softmax. q: 1xd, keys/values: Nxd. Returns 1xd.
int attention(Tape& tape, int q, int keys, int values, const std::vector<bool>& mask);

// Multi-head attention: per-head slices of q/keys/values, concatenated and
// passed through the output projection. Returns 1xh.
int mha(Tape& tape, ParamBinder& bind, const DecoderConfig& cfg, int q,
        const DecoderCache& cache, const std::vector<bool>& mask);

// Glimpse for one decision: query from the context, MHA over the embeddings.
// The feed-forward + batch-norm stage is applied by the caller so that
// training can batch it across concurrent decisions.
int decoder_glimpse(Tape& tape, ParamBinder& bind, const DecoderConfig& cfg,
                    const std::vector<double>& context, const DecoderCache& cache,
                    const std::vector<bool>& mask);

// Feed-forward + batch-norm over a batch of glimpse rows (MxH).
int decoder_feedforward(Tape& tape, ParamBinder& bind, ParamStore& store,
                        int glimpses, bool training);

// Clipped tanh compatibility of one processed glimpse row (1xh) against the
// keys, masked softmax over feasible tasks. Returns the probability node.
int action_logits_softmax(Tape& tape, const DecoderConfig& cfg, int glimpse_row,
                          int keys, const std::vector<bool>& mask);

// Convenience wrapper for a single decision (eval-mode batch norm unless
// `training` is set). Returns the probability node id.
int action_distribution(Tape& tape, ParamBinder& bind, ParamStore& store,
                        const DecoderConfig& cfg, const ProblemInstance& inst,
                        const SimState& state, int robot, const DecoderCache& cache,
                        const std::vector<bool>& mask, bool training = false);

}  // namespace capam
