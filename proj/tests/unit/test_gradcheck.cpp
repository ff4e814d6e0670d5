#include <doctest.h>

#include "test_support.hpp"

using namespace tweetfuse::testing;

namespace {

void require_close(const GradCheck& g) {
  CAPTURE(g.worst);
  CAPTURE(g.max_rel_error);
  CHECK(g.entries > 0);
  CHECK(g.max_rel_error < 1e-4);
}

}  // namespace

TEST_CASE("conv1d gradients") {
  for (std::uint64_t s = 0; s < 5; ++s) require_close(gradcheck_conv1d(s));
}

TEST_CASE("maxpool gradients") {
  for (std::uint64_t s = 0; s < 5; ++s) require_close(gradcheck_maxpool(s));
}

TEST_CASE("dense + softmax + cross-entropy gradients") {
  for (std::uint64_t s = 0; s < 5; ++s) require_close(gradcheck_dense_softmax_ce(s));
}

TEST_CASE("lstm gradients") {
  for (std::uint64_t s = 0; s < 5; ++s) require_close(gradcheck_lstm(s));
}

TEST_CASE("bilstm gradients") {
  for (std::uint64_t s = 0; s < 5; ++s) require_close(gradcheck_bilstm(s));
}

TEST_CASE("end-to-end fusion model gradients") {
  for (std::uint64_t s = 0; s < 5; ++s) require_close(gradcheck_fusion_model(s));
}
