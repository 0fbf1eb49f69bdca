#pragma once

#include "coordbridge/dsl.hpp"

#include <stdexcept>
#include <string>

namespace support {

inline coordbridge::document load_document(const std::string& file)
{
    auto r = coordbridge::parse_file(std::string(COORDBRIDGE_MODELS) + "/" + file);
    if (!r.ok())
        throw std::runtime_error(coordbridge::format_diagnostic(r.diagnostics.front(), file));
    return *r.doc;
}

template <class T>
T load(const std::string& file)
{
    return std::get<T>(load_document(file).primary());
}

} // namespace support
