#pragma once

#include <iosfwd>
#include <string>

#include "msda/nn/mlp.hpp"

namespace msda::nn {

// Text checkpoint: magic header, layer shapes, then row-major entries
// printed with round-trip precision. Doubles survive save/load exactly.
void save_mlp(std::ostream& out, const Mlp& params);
Mlp load_mlp(std::istream& in);

void save_mlp_file(const std::string& path, const Mlp& params);
Mlp load_mlp_file(const std::string& path);

} // namespace msda::nn
