#pragma once

#include <string>

#include "mtrec/mdp/types.hpp"

namespace mtrec::mdp {

// Line-delimited dataset file, one JSON object per line, UTF-8.
//   header:  {"schema_version":1,"seed":...,"embedding_dim":...,"env_config_hash":...}
//   catalog: {"kind":"item","id":...,"topic":...,"clickbait":...,"embedding":[...]}
//   steps:   {"kind":"step","user":...,"traj":...,"t":...,"item":...,"action":0|1,
//             "true_r":...,"r_pos":...,"r_neg":...}   (last three optional)
// Reals use the shortest round-trip decimal form; read(write(d)) == d.
void write_dataset(const Dataset& data, const std::string& path);
std::string dataset_to_string(const Dataset& data);

Dataset read_dataset(const std::string& path);
Dataset dataset_from_string(const std::string& text, const std::string& origin);

}  // namespace mtrec::mdp
