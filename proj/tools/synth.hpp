#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scenecode/harness/replay_store.hpp"
#include "scenecode/harness/run.hpp"

namespace scenecode::tools {

// Per-item response kinds for synthetic replay stores, one letter each:
//   o  oracle (serialize(L, gt) / the gt answer)
//   w  wrapped oracle ("Final answer: <gt>" after some reasoning)
//   c  corrupted (jittered positions and scales, one class swapped, one object dropped)
//   x  wrong answer (QA only)
//   e  empty response
//   g  garbled text that parses to nothing
//   f  recorded client failure
// The pattern repeats when it is shorter than the item list.
struct SynthSpec {
  std::string pattern = "o";
  std::uint64_t seed = 0;
};

std::size_t synth_reconstruction(harness::ReplayStore& store, const harness::RunConfig& config,
                                 const SynthSpec& spec);

std::size_t synth_qa(harness::ReplayStore& store, const harness::RunConfig& config,
                     const std::vector<QAItem>& qa_set, const SynthSpec& spec);

}  // namespace scenecode::tools
