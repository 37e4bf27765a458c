#pragma once

#include <filesystem>
#include <string>

#include "wfnet/io.hpp"

namespace wfgen {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(WFNET_FIXTURES) / name; }

inline wfnet::LgwfNet load_fixture(const std::string& name) { return wfnet::load_net(fixture(name + ".wfnet")); }

}  // namespace wfgen
