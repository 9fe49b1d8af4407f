#include "capam/encoder.hpp"

#include <stdexcept>

namespace capam {

namespace {

std::string wname(int layer, int p, int k) {
  return "enc.l" + std::to_string(layer) + ".p" + std::to_string(p) + ".k" +
         std::to_string(k) + ".W";
}

}  // namespace

void register_encoder_params(ParamStore& store, const EncoderConfig& cfg, Rng& rng) {
  store.add("enc.W0", uniform_init(cfg.feat_dim, cfg.h0, cfg.feat_dim, rng));
  store.add("enc.b0", uniform_init(1, cfg.h0, cfg.feat_dim, rng));
  for (int l = 1; l <= cfg.L_e; ++l) {
    const int in = cfg.layer_input(l);
    for (int p = 1; p <= cfg.P; ++p)
      for (int k = 0; k <= cfg.K; ++k)
        store.add(wname(l, p, k), uniform_init(in, cfg.h, in, rng));
  }
  const int final_in = cfg.h * cfg.P;
  store.add("enc.Wf", uniform_init(final_in, cfg.h, final_in, rng));
  store.add("enc.bf", uniform_init(1, cfg.h, final_in, rng));
}

int encode(Tape& tape, ParamBinder& bind, const TaskGraph& graph,
           const EncoderConfig& cfg) {
  if (graph.features.cols != cfg.feat_dim)
    throw std::invalid_argument("encode: graph has " +
                                std::to_string(graph.features.cols) +
                                " features, config expects " +
                                std::to_string(cfg.feat_dim));
  if (static_cast<int>(graph.l_powers.size()) != cfg.K + 1)
    throw std::invalid_argument("encode: graph built with wrong filter degree");

  std::vector<int> lpow_ids;
  lpow_ids.reserve(cfg.K + 1);
  for (const Tensor& lp : graph.l_powers) lpow_ids.push_back(tape.leaf(lp));

  const int x = tape.leaf(graph.features);
  int f = tape.add_rowvec(tape.matmul(x, bind("enc.W0")), bind("enc.b0"));

  for (int l = 1; l <= cfg.L_e; ++l) {
    std::vector<int> moments;
    moments.reserve(cfg.P);
    for (int p = 1; p <= cfg.P; ++p) {
      const int fp = p == 1 ? f : tape.pow_elem(f, p);
      int acc = -1;
      for (int k = 0; k <= cfg.K; ++k) {
        const int term = tape.matmul(tape.matmul(lpow_ids[k], fp), bind(wname(l, p, k)));
        acc = k == 0 ? term : tape.add(acc, term);
      }
      moments.push_back(cfg.act == Activation::Relu ? tape.relu(acc) : acc);
    }
    f = cfg.P == 1 ? moments[0] : tape.concat_cols(moments);
  }

  return tape.add_rowvec(tape.matmul(f, bind("enc.Wf")), bind("enc.bf"));
}

}  // namespace capam
