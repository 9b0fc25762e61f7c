#pragma once

// A small trained model and its cos-feature database for server tests.

#include <memory>

#include "arpf/features.hpp"
#include "arpf/netdemo.hpp"
#include "arpf/svm.hpp"

namespace demo {

struct Fixture {
  arpf::Dataset train, test;
  arpf::FeatureEmbedding cos, q;
  std::shared_ptr<const arpf::ServerState> state;
};

inline Fixture make_fixture(std::size_t m, std::uint64_t seed = 11, std::size_t n_train = 300,
                            std::size_t n_test = 100) {
  using namespace arpf;
  MixtureSpec spec;
  spec.n = n_train + n_test;
  spec.seed = seed;
  const Dataset all = synth_gaussian_mixture(spec);
  std::vector<std::size_t> tr, te;
  for (std::size_t i = 0; i < all.n(); ++i) (i < n_train ? tr : te).push_back(i);
  Dataset train = all.subset(tr), test = all.subset(te);

  const auto sampler = FrequencySampler::gaussian(2.0, spec.d);
  SolverOptions o;
  o.R = 5.0;
  SvmModel model = train_exact(train, sampler, o);
  model.embedding = EmbeddingRef{seed, m, sampler.spec(), spec.d, "cos"};
  auto draw = std::make_shared<const RandomDraw>(sampler.draw(m, seed));
  FeatureEmbedding cos(draw, PeriodicMap::cosine()), q(draw, PeriodicMap::universal_quantizer());
  auto state = ServerState::create(model, cos.embed_batch(train.x.data, train.n()));
  return {std::move(train), std::move(test), std::move(cos), std::move(q), std::move(state)};
}

}  // namespace demo
