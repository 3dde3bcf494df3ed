#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zipper/core.hpp"

namespace zipper {

enum class ResponseType { continuous, binary };

// Observations Z_i = (Y_i, X_i). A dataset may have zero covariate columns.
struct Dataset {
    Vector y;
    Matrix x;
    std::vector<std::string> columns;
    std::string response_name = "y";
    ResponseType response_type = ResponseType::continuous;

    std::size_t n() const { return static_cast<std::size_t>(y.size()); }
    std::size_t p() const { return static_cast<std::size_t>(x.cols()); }

    // Throws DomainError on mismatched shapes, non-finite entries or a
    // binary response holding values other than 0/1.
    void validate() const;

    // Column index by name, or by a plain non-negative integer.
    std::size_t column_index(std::string_view name_or_index) const;
};

// Builds a dataset from raw arrays, detecting the response type.
Dataset make_dataset(Vector y, Matrix x, std::vector<std::string> columns = {});

ResponseType detect_response_type(const Vector& y);

enum class NaPolicy { fail, drop_rows };

// Reads a header-first, comma-separated file. An empty feature list selects
// every column except the response. "NA", "NaN" and empty cells count as
// missing.
Dataset ingest_csv(const std::filesystem::path& path, std::string_view response,
                   std::span<const std::string> features, NaPolicy na_policy,
                   bool no_features = false);

}  // namespace zipper
