#ifndef FANETSIM_RNG_HPP_
#define FANETSIM_RNG_HPP_

#include <cstdint>
#include <random>

namespace fanetsim {

// splitmix64 finalizer, used to derive well-separated engine seeds from a
// master seed plus stream tags.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent sub-stream domains. Each (domain, id) pair gets its own engine
// so adding a node or switching policy never perturbs anyone else's draws.
enum class Stream : std::uint64_t {
  Mobility = 0x01,
  Policy = 0x02,
  Traffic = 0x03,
};

inline std::uint64_t derive_seed(std::uint64_t master, Stream domain,
                                 std::uint64_t id = 0) {
  std::uint64_t s = mix64(master);
  s = mix64(s ^ (static_cast<std::uint64_t>(domain) << 32));
  return mix64(s ^ id);
}

inline std::mt19937_64 make_engine(std::uint64_t master, Stream domain,
                                   std::uint64_t id = 0) {
  return std::mt19937_64(derive_seed(master, domain, id));
}

}  // namespace fanetsim

#endif  // FANETSIM_RNG_HPP_
