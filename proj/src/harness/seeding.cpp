#include "metabbo/harness.hpp"

namespace metabbo::harness {

std::uint64_t replication_seed(std::uint64_t master_seed, int function_id, int dim, std::size_t replication) {
  std::uint64_t s = combine_seed(master_seed, 0x7265706cULL);  // "repl"
  s = combine_seed(s, static_cast<std::uint64_t>(function_id));
  s = combine_seed(s, static_cast<std::uint64_t>(dim));
  return combine_seed(s, static_cast<std::uint64_t>(replication));
}

std::uint64_t stream_seed(std::uint64_t master_seed, std::string_view stream) {
  // FNV-1a over the stream name, folded into the master seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : stream) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return combine_seed(master_seed, h);
}

}  // namespace metabbo::harness
