#include "continuized/random.hpp"

namespace continuized {

namespace {

// splitmix64 finalizer; spreads nearby seeds apart before seeding the engine.
std::uint64_t mix64(std::uint64_t v) {
  v += 0x9e3779b97f4a7c15ULL;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
  return v ^ (v >> 31);
}

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t stream_id) {
  const std::uint64_t a = mix64(seed);
  const std::uint64_t b = mix64(a ^ mix64(stream_id + 0x632be59bd9b4e019ULL));
  return std::seed_seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                       static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  auto seq = make_seed_seq(seed, stream_id);
  engine_.seed(seq);
}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() { return normal_(engine_); }

}  // namespace continuized
