#pragma once

#include <optional>
#include <string>
#include <vector>

#include "msda/data/domain.hpp"

namespace msda::data {

enum class FileFormat { DenseCsv, SparseSv };
enum class DomainRole { Source, Target };

struct ManifestEntry {
    std::string path;
    DomainRole role = DomainRole::Source;
    FileFormat format = FileFormat::DenseCsv;
    bool labeled = true;
};

// List of domain files plus the dataset feature dimension. Exactly one
// target entry; target labels, when present in the file, come back as
// oracle labels only.
struct DomainManifest {
    std::size_t dim = 0;
    std::vector<ManifestEntry> entries;

    void validate() const;
};

struct LoadedDomain {
    Matrix x;
    std::optional<std::vector<int>> y;
};

// Dense CSV: header row, then comma-separated feature rows with an optional
// final integer label column.
LoadedDomain load_dense_csv(const std::string& path, bool has_labels);
void save_dense_csv(const std::string& path, const Matrix& x, const std::vector<int>* y);

// Sparse rows: `label idx:val idx:val ...`, 0-based strictly increasing
// indices, dim supplied by the manifest. An empty feature list is a zero
// vector.
LoadedDomain load_sparse_sv(const std::string& path, std::size_t dim);
void save_sparse_sv(const std::string& path, const Matrix& x, const std::vector<int>& y);

DomainManifest load_manifest(const std::string& path);
void save_manifest(const std::string& path, const DomainManifest& manifest);

struct ManifestData {
    std::vector<LabeledDomain> sources;
    UnlabeledDomain target;
};

// Load every entry; relative paths resolve against the manifest's directory.
ManifestData load_manifest_domains(const std::string& manifest_path);

} // namespace msda::data
