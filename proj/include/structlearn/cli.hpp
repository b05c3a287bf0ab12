#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace structlearn::cli {

namespace exit_code {
inline constexpr int success = 0;
inline constexpr int data_error = 2;
inline constexpr int training_failure = 3;
inline constexpr int model_mismatch = 4;
inline constexpr int usage = 64;
}  // namespace exit_code

// Runs one command line (args[0] is the program name).
//
//   train      --task T --train FILE --model FILE [--report CSV] [--algo A]
//   predict    --task T --model FILE --test FILE [--output FILE]
//   evaluate   --task T --test GOLD --output PREDICTED [--model FILE]
//   benchmark  --task T --train FILE --test FILE [--output CSV] [--algo A]
//
// Learner flags: --C --eta --epochs --tolerance --threads --seed, plus
// --affixes (sequence) and --no-bias (multiclass).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace structlearn::cli
