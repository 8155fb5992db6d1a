#pragma once

#include <iosfwd>
#include <string>

#include "msda/mdan/model.hpp"

namespace msda::mdan {

void save_model(std::ostream& out, const MdanModel& model);
MdanModel load_model(std::istream& in);

void save_model_file(const std::string& path, const MdanModel& model);
MdanModel load_model_file(const std::string& path);

} // namespace msda::mdan
