#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace textfeat {

enum class ColumnKind { Categorical, Ordinal, Binary, Text, Numeric };

std::string_view to_string(ColumnKind kind);
ColumnKind column_kind_from_string(std::string_view name);

inline bool is_categorical(ColumnKind kind) {
    return kind == ColumnKind::Categorical || kind == ColumnKind::Ordinal ||
           kind == ColumnKind::Binary;
}

using Cell = std::optional<std::string>;

// A named column of cells. Categorical kinds (categorical, ordinal, binary)
// carry an ordered category list and 0-based integer codes in that order.
class Column {
public:
    // Throws EncodingError listing offending rows if a non-missing cell of a
    // categorical column is not a declared category, and SchemaError for a
    // binary column without exactly two categories.
    Column(std::string name, ColumnKind kind, std::vector<Cell> cells,
           std::vector<std::string> categories = {});

    const std::string& name() const { return name_; }
    ColumnKind kind() const { return kind_; }
    const std::vector<std::string>& categories() const { return categories_; }
    const std::vector<Cell>& cells() const { return cells_; }
    std::size_t size() const { return cells_.size(); }

    bool missing(std::size_t row) const { return !cells_[row].has_value(); }
    const Cell& cell(std::size_t row) const { return cells_[row]; }
    // Category code; nullopt for missing cells or non-categorical columns.
    std::optional<int> code(std::size_t row) const;
    // Numeric view: parsed value for numeric columns, code for categorical.
    std::optional<double> number(std::size_t row) const;
    std::optional<int> category_index(std::string_view value) const;

    Column renamed(std::string name) const;
    Column select(std::span<const std::size_t> rows) const;

private:
    std::string name_;
    ColumnKind kind_;
    std::vector<std::string> categories_;
    std::vector<Cell> cells_;
    std::vector<int> codes_;  // -1 for missing; empty for text/numeric
};

struct InvalidCell {
    std::string row_id;
    std::string column;
    std::string value;
};

// Encoded dataset: feature columns plus a categorical target, keyed by
// stable row ids. Value type; every operation returns a new table.
class AugmentedTable {
public:
    AugmentedTable(std::vector<std::string> row_ids, std::vector<Column> columns,
                   std::string target, std::vector<InvalidCell> invalid_cells = {});

    std::size_t n_rows() const { return row_ids_.size(); }
    const std::vector<std::string>& row_ids() const { return row_ids_; }
    const std::vector<Column>& columns() const { return columns_; }
    const std::string& target_name() const { return target_; }
    const Column& target() const { return column(target_); }
    // Cells rejected while loading because they fell outside a declared
    // value space. Those cells are stored as missing.
    const std::vector<InvalidCell>& invalid_cells() const { return invalid_cells_; }

    bool has_column(std::string_view name) const;
    const Column& column(std::string_view name) const;
    std::optional<std::size_t> row_index(std::string_view row_id) const;

    AugmentedTable with_column(Column column) const;  // replaces a same-named column
    AugmentedTable without_column(std::string_view name) const;
    AugmentedTable with_target(std::string name) const;
    AugmentedTable select_rows(std::span<const std::size_t> rows) const;

private:
    std::vector<std::string> row_ids_;
    std::vector<Column> columns_;
    std::string target_;
    std::vector<InvalidCell> invalid_cells_;
};

struct ColumnHint {
    ColumnKind kind = ColumnKind::Categorical;
    std::vector<std::string> categories;  // declared value space, in order
};

struct LoadOptions {
    std::string target;
    std::string id_column = "row_id";   // used when present in the header
    std::map<std::string, ColumnHint, std::less<>> hints;
    std::size_t max_inferred_levels = 20;
};

// Column kinds are taken from hints, otherwise inferred: few distinct short
// values become categorical (numeric-looking values sorted numerically,
// others lexicographically), many numeric values become numeric, and the
// rest is text. Columns named X_code next to X (the export format) are read
// back as X's category codes.
AugmentedTable read_csv_table(std::string_view text, const LoadOptions& options);
AugmentedTable load_csv(const std::filesystem::path& path, const LoadOptions& options);

// Export: row_id first, then each column; categorical columns are followed
// by a NAME_code column holding the integer codes.
void write_csv(const AugmentedTable& table, std::ostream& out);
void save_csv(const AugmentedTable& table, const std::filesystem::path& path);

Column encode_ordinal(const Column& column, std::vector<std::string> order);

// Splits a set-valued column (cells hold labels joined by `separator`) into
// one binary column per label, named COLUMN_label.
std::vector<Column> explode_multilabel(const Column& column, std::span<const std::string> labels,
                                       char separator = ';');

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 42;
};

// Seeded Fisher-Yates shuffle of row positions (mt19937_64 with rejection
// sampled bounds) followed by a prefix cut of round(n * train_fraction).
std::pair<AugmentedTable, AugmentedTable> split(const AugmentedTable& table, const SplitSpec& spec);

// Proportional stratified sample of `count` rows over `column`'s categories
// (largest-remainder allocation), returned in original row order.
AugmentedTable stratified_sample(const AugmentedTable& table, std::string_view column,
                                 std::size_t count, std::uint64_t seed);

struct TargetBinning {
    // bin label -> source categories, in label order
    std::vector<std::pair<std::string, std::vector<std::string>>> bins;
    std::string output_column;  // defaults to TARGET_bin
};

struct BinnedTable {
    AugmentedTable table;
    std::size_t excluded_rows = 0;  // rows whose target fell outside every bin
};

BinnedTable bin_target(const AugmentedTable& table, const TargetBinning& binning);

struct Item {
    std::string attribute;
    std::string value;

    auto operator<=>(const Item&) const = default;
};

using Itemset = std::vector<Item>;

// One itemset per row with a non-missing target: an item per non-missing
// mined attribute (in column order) followed by the target item. With no
// attribute list, every categorical column except the target is mined.
std::vector<Itemset> to_transactions(const AugmentedTable& table,
                                     std::optional<std::vector<std::string>> attributes = {});

std::string to_snake_case(std::string_view name);

}  // namespace textfeat
