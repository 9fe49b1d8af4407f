#include "capam/decoder.hpp"

#include <cmath>
#include <stdexcept>

namespace capam {

std::vector<double> build_context(const ProblemInstance& inst, const SimState& state,
                                  int robot) {
  const double d_max = inst.max_deadline();
  const RobotState& self = state.robots[robot];

  double peer_dest_x = 0.0, peer_dest_y = 0.0, peer_cap = 0.0;
  int peers = 0;
  for (int j = 0; j < inst.num_robots(); ++j) {
    if (j == robot) continue;
    const RobotState& r = state.robots[j];
    if (r.destination >= 0) {
      peer_dest_x += inst.tasks[r.destination].x;
      peer_dest_y += inst.tasks[r.destination].y;
    } else {
      // idle peers contribute their current location as destination
      peer_dest_x += r.x;
      peer_dest_y += r.y;
    }
    peer_cap += inst.robots[j].capacity;
    ++peers;
  }
  if (peers > 0) {
    peer_dest_x /= peers;
    peer_dest_y /= peers;
    peer_cap /= peers;
  } else {
    peer_dest_x = self.x;
    peer_dest_y = self.y;
  }

  return {state.t / d_max,
          inst.robots[robot].capacity / kMaxCapacity,
          self.x / inst.grid,
          self.y / inst.grid,
          peer_dest_x / inst.grid,
          peer_dest_y / inst.grid,
          peer_cap / kMaxCapacity,
          peers / kPeerCountRef};
}

void register_decoder_params(ParamStore& store, const DecoderConfig& cfg, Rng& rng) {
  if (cfg.h % cfg.heads != 0)
    throw std::invalid_argument("decoder: h (" + std::to_string(cfg.h) +
                                ") not divisible by heads (" +
                                std::to_string(cfg.heads) + ")");
  store.add("dec.Wk", uniform_init(cfg.h, cfg.h, cfg.h, rng));
  store.add("dec.Wv", uniform_init(cfg.h, cfg.h, cfg.h, rng));
  store.add("dec.Wq", uniform_init(cfg.hq, cfg.h, cfg.hq, rng));
  store.add("dec.Wo", uniform_init(cfg.h, cfg.h, cfg.h, rng));
  store.add("dec.ff.W", uniform_init(cfg.h, cfg.h, cfg.h, rng));
  store.add("dec.ff.b", uniform_init(1, cfg.h, cfg.h, rng));
  store.add("dec.bn.gamma", Tensor(1, cfg.h, 1.0));
  store.add("dec.bn.beta", Tensor(1, cfg.h, 0.0));
  store.add("dec.bn.run_mean", Tensor(1, cfg.h, 0.0), /*trainable=*/false);
  store.add("dec.bn.run_var", Tensor(1, cfg.h, 1.0), /*trainable=*/false);
}

DecoderCache project_embeddings(Tape& tape, ParamBinder& bind, int embeddings) {
  DecoderCache c;
  c.keys = tape.matmul(embeddings, bind("dec.Wk"));
  c.values = tape.matmul(embeddings, bind("dec.Wv"));
  return c;
}

int attention(Tape& tape, int q, int keys, int values, const std::vector<bool>& mask) {
  const int d = tape.value(q).cols;
  const int scores = tape.scale(tape.matmul(q, tape.transpose(keys)),
                                1.0 / std::sqrt(static_cast<double>(d)));
  const int weights = tape.masked_softmax(scores, mask);
  return tape.matmul(weights, values);
}

int mha(Tape& tape, ParamBinder& bind, const DecoderConfig& cfg, int q,
        const DecoderCache& cache, const std::vector<bool>& mask) {
  const int dh = cfg.head_dim();
  std::vector<int> heads;
  heads.reserve(cfg.heads);
  for (int h = 0; h < cfg.heads; ++h) {
    const int c0 = h * dh, c1 = (h + 1) * dh;
    heads.push_back(attention(tape, tape.slice_cols(q, c0, c1),
                              tape.slice_cols(cache.keys, c0, c1),
                              tape.slice_cols(cache.values, c0, c1), mask));
  }
  const int concat = cfg.heads == 1 ? heads[0] : tape.concat_cols(heads);
  return tape.matmul(concat, bind("dec.Wo"));
}

int decoder_glimpse(Tape& tape, ParamBinder& bind, const DecoderConfig& cfg,
                    const std::vector<double>& context, const DecoderCache& cache,
                    const std::vector<bool>& mask) {
  if (static_cast<int>(context.size()) != cfg.hq)
    throw std::invalid_argument("decoder: context width mismatch");
  const int ctx = tape.leaf(Tensor::row(context));
  const int q = tape.matmul(ctx, bind("dec.Wq"));
  return mha(tape, bind, cfg, q, cache, mask);
}

int decoder_feedforward(Tape& tape, ParamBinder& bind, ParamStore& store,
                        int glimpses, bool training) {
  const int f = tape.relu(
      tape.add_rowvec(tape.matmul(glimpses, bind("dec.ff.W")), bind("dec.ff.b")));
  BatchNormStats stats;
  stats.mean = store.value("dec.bn.run_mean");
  stats.var = store.value("dec.bn.run_var");
  const int out = tape.batch_norm(f, bind("dec.bn.gamma"), bind("dec.bn.beta"),
                                  &stats, training);
  if (training) {
    store.value("dec.bn.run_mean") = stats.mean;
    store.value("dec.bn.run_var") = stats.var;
  }
  return out;
}

int action_logits_softmax(Tape& tape, const DecoderConfig& cfg, int glimpse_row,
                          int keys, const std::vector<bool>& mask) {
  const int compat = tape.scale(tape.matmul(glimpse_row, tape.transpose(keys)),
                                1.0 / std::sqrt(static_cast<double>(cfg.h)));
  const int logits = tape.scale(tape.tanh_elem(compat), cfg.clip);
  const int probs = tape.masked_softmax(logits, mask);
  if (!tape.value(probs).all_finite())
    throw std::runtime_error("decoder: non-finite action probabilities");
  return probs;
}

int action_distribution(Tape& tape, ParamBinder& bind, ParamStore& store,
                        const DecoderConfig& cfg, const ProblemInstance& inst,
                        const SimState& state, int robot, const DecoderCache& cache,
                        const std::vector<bool>& mask, bool training) {
  const int g = decoder_glimpse(tape, bind, cfg, build_context(inst, state, robot),
                                cache, mask);
  const int gp = decoder_feedforward(tape, bind, store, g, training);
  return action_logits_softmax(tape, cfg, gp, cache.keys, mask);
}

}  // namespace capam
