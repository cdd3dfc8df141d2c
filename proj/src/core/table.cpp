#include "textfeat/table.hpp"

#include "textfeat/csv.hpp"
#include "textfeat/error.hpp"
#include "textfeat/rng.hpp"
#include "textfeat/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace textfeat {

namespace {

constexpr std::size_t kMaxListedRows = 10;

std::string list_rows(const std::vector<std::size_t>& rows) {
    std::string out;
    for (std::size_t i = 0; i < rows.size() && i < kMaxListedRows; ++i) {
        if (i) out += ", ";
        out += std::to_string(rows[i]);
    }
    if (rows.size() > kMaxListedRows) out += ", ...";
    return out;
}

bool all_numeric(const std::vector<std::string>& values) {
    return std::all_of(values.begin(), values.end(),
                       [](const std::string& v) { return text::parse_number(v).has_value(); });
}

void sort_categories(std::vector<std::string>& values) {
    if (all_numeric(values)) {
        std::stable_sort(values.begin(), values.end(), [](const auto& a, const auto& b) {
            return *text::parse_number(a) < *text::parse_number(b);
        });
    } else {
        std::sort(values.begin(), values.end());
    }
}

}  // namespace

std::string_view to_string(ColumnKind kind) {
    switch (kind) {
        case ColumnKind::Categorical: return "categorical";
        case ColumnKind::Ordinal: return "ordinal";
        case ColumnKind::Binary: return "binary";
        case ColumnKind::Text: return "text";
        case ColumnKind::Numeric: return "numeric";
    }
    return "categorical";
}

ColumnKind column_kind_from_string(std::string_view name) {
    if (name == "categorical") return ColumnKind::Categorical;
    if (name == "ordinal") return ColumnKind::Ordinal;
    if (name == "binary") return ColumnKind::Binary;
    if (name == "text") return ColumnKind::Text;
    if (name == "numeric") return ColumnKind::Numeric;
    throw ConfigError("unknown column kind '" + std::string(name) + "'");
}

Column::Column(std::string name, ColumnKind kind, std::vector<Cell> cells,
               std::vector<std::string> categories)
    : name_(std::move(name)), kind_(kind), categories_(std::move(categories)), cells_(std::move(cells)) {
    if (!is_categorical(kind_)) {
        categories_.clear();
        if (kind_ == ColumnKind::Numeric) {
            for (std::size_t r = 0; r < cells_.size(); ++r) {
                if (cells_[r] && !text::parse_number(*cells_[r])) {
                    throw EncodingError("column '" + name_ + "' row " + std::to_string(r) +
                                        ": '" + *cells_[r] + "' is not numeric");
                }
            }
        }
        return;
    }
    if (kind_ == ColumnKind::Binary && categories_.size() != 2) {
        throw SchemaError("binary column '" + name_ + "' needs exactly two categories, got " +
                          std::to_string(categories_.size()));
    }
    std::unordered_map<std::string, int> index;
    for (std::size_t i = 0; i < categories_.size(); ++i) {
        if (!index.emplace(categories_[i], static_cast<int>(i)).second) {
            throw SchemaError("column '" + name_ + "' declares category '" + categories_[i] +
                              "' twice");
        }
    }
    codes_.assign(cells_.size(), -1);
    std::vector<std::size_t> bad;
    for (std::size_t r = 0; r < cells_.size(); ++r) {
        if (!cells_[r]) continue;
        const auto it = index.find(*cells_[r]);
        if (it == index.end()) {
            bad.push_back(r);
        } else {
            codes_[r] = it->second;
        }
    }
    if (!bad.empty()) {
        throw EncodingError("column '" + name_ + "': value '" + *cells_[bad.front()] +
                            "' outside the declared categories at rows " + list_rows(bad));
    }
}

std::optional<int> Column::code(std::size_t row) const {
    if (codes_.empty() || codes_[row] < 0) return std::nullopt;
    return codes_[row];
}

std::optional<double> Column::number(std::size_t row) const {
    if (!cells_[row]) return std::nullopt;
    if (kind_ == ColumnKind::Numeric) return text::parse_number(*cells_[row]);
    if (is_categorical(kind_)) return static_cast<double>(codes_[row]);
    return text::parse_number(*cells_[row]);
}

std::optional<int> Column::category_index(std::string_view value) const {
    const auto it = std::find(categories_.begin(), categories_.end(), value);
    if (it == categories_.end()) return std::nullopt;
    return static_cast<int>(it - categories_.begin());
}

Column Column::renamed(std::string name) const {
    Column out = *this;
    out.name_ = std::move(name);
    return out;
}

Column Column::select(std::span<const std::size_t> rows) const {
    Column out = *this;
    out.cells_.clear();
    out.codes_.clear();
    out.cells_.reserve(rows.size());
    for (auto r : rows) out.cells_.push_back(cells_.at(r));
    if (!codes_.empty()) {
        out.codes_.reserve(rows.size());
        for (auto r : rows) out.codes_.push_back(codes_[r]);
    }
    return out;
}

AugmentedTable::AugmentedTable(std::vector<std::string> row_ids, std::vector<Column> columns,
                               std::string target, std::vector<InvalidCell> invalid_cells)
    : row_ids_(std::move(row_ids)),
      columns_(std::move(columns)),
      target_(std::move(target)),
      invalid_cells_(std::move(invalid_cells)) {
    std::unordered_set<std::string> ids;
    for (const auto& id : row_ids_) {
        if (!ids.insert(id).second) throw SchemaError("duplicate row id '" + id + "'");
    }
    std::unordered_set<std::string> names;
    for (const auto& col : columns_) {
        if (!names.insert(col.name()).second) {
            throw SchemaError("duplicate column '" + col.name() + "'");
        }
        if (col.size() != row_ids_.size()) {
            throw SchemaError("column '" + col.name() + "' has " + std::to_string(col.size()) +
                              " cells, table has " + std::to_string(row_ids_.size()) + " rows");
        }
    }
    if (!has_column(target_)) throw SchemaError("target column '" + target_ + "' not found");
    if (!is_categorical(column(target_).kind())) {
        throw SchemaError("target column '" + target_ + "' must be categorical or ordinal");
    }
}

bool AugmentedTable::has_column(std::string_view name) const {
    return std::any_of(columns_.begin(), columns_.end(),
                       [&](const Column& c) { return c.name() == name; });
}

const Column& AugmentedTable::column(std::string_view name) const {
    for (const auto& c : columns_) {
        if (c.name() == name) return c;
    }
    throw SchemaError("column '" + std::string(name) + "' not found");
}

std::optional<std::size_t> AugmentedTable::row_index(std::string_view row_id) const {
    const auto it = std::find(row_ids_.begin(), row_ids_.end(), row_id);
    if (it == row_ids_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - row_ids_.begin());
}

AugmentedTable AugmentedTable::with_column(Column column) const {
    auto columns = columns_;
    const auto it = std::find_if(columns.begin(), columns.end(),
                                 [&](const Column& c) { return c.name() == column.name(); });
    if (it != columns.end()) {
        *it = std::move(column);
    } else {
        columns.push_back(std::move(column));
    }
    return AugmentedTable(row_ids_, std::move(columns), target_, invalid_cells_);
}

AugmentedTable AugmentedTable::without_column(std::string_view name) const {
    if (name == target_) throw SchemaError("cannot drop the target column '" + target_ + "'");
    auto columns = columns_;
    std::erase_if(columns, [&](const Column& c) { return c.name() == name; });
    return AugmentedTable(row_ids_, std::move(columns), target_, invalid_cells_);
}

AugmentedTable AugmentedTable::with_target(std::string name) const {
    return AugmentedTable(row_ids_, columns_, std::move(name), invalid_cells_);
}

AugmentedTable AugmentedTable::select_rows(std::span<const std::size_t> rows) const {
    std::vector<std::string> ids;
    ids.reserve(rows.size());
    for (auto r : rows) ids.push_back(row_ids_.at(r));
    std::vector<Column> columns;
    columns.reserve(columns_.size());
    for (const auto& c : columns_) columns.push_back(c.select(rows));
    std::unordered_set<std::string> kept(ids.begin(), ids.end());
    std::vector<InvalidCell> invalid;
    for (const auto& cell : invalid_cells_) {
        if (kept.count(cell.row_id)) invalid.push_back(cell);
    }
    return AugmentedTable(std::move(ids), std::move(columns), target_, std::move(invalid));
}

AugmentedTable read_csv_table(std::string_view content, const LoadOptions& options) {
    const auto records = csv::parse(content);
    if (records.empty()) throw ParseError("csv input is empty (no header row)", 1);
    const auto& header = records.front();
    const std::size_t n = records.size() - 1;

    std::map<std::string, std::size_t, std::less<>> position;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string name(text::trim(header[c]));
        if (name.empty()) throw ParseError("csv header has an empty column name", 1);
        if (!position.emplace(name, c).second) {
            throw ParseError("csv header repeats column '" + name + "'", 1);
        }
    }
    if (options.target.empty()) throw SchemaError("no target column given");
    if (!position.count(options.target)) {
        throw SchemaError("target column '" + options.target + "' absent from csv header");
    }

    auto raw_cells = [&](std::size_t c) {
        std::vector<Cell> cells(n);
        for (std::size_t r = 0; r < n; ++r) {
            const auto v = text::trim(records[r + 1][c]);
            if (!v.empty()) cells[r] = std::string(v);
        }
        return cells;
    };

    std::vector<std::string> row_ids(n);
    const auto id_it = position.find(options.id_column);
    const bool has_ids = !options.id_column.empty() && id_it != position.end();
    for (std::size_t r = 0; r < n; ++r) {
        row_ids[r] = has_ids ? std::string(text::trim(records[r + 1][id_it->second]))
                             : std::to_string(r);
        if (row_ids[r].empty()) {
            throw ParseError("csv record " + std::to_string(r + 2) + " has an empty row id", r + 2);
        }
    }

    std::vector<Column> columns;
    std::vector<InvalidCell> invalid;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string name(text::trim(header[c]));
        if (has_ids && c == id_it->second) continue;
        if (name.size() > 5 && name.ends_with("_code") &&
            position.count(name.substr(0, name.size() - 5))) {
            continue;
        }
        auto cells = raw_cells(c);

        const auto hint = options.hints.find(name);
        if (hint != options.hints.end() && !hint->second.categories.empty()) {
            const auto& declared = hint->second.categories;
            for (std::size_t r = 0; r < n; ++r) {
                if (cells[r] && std::find(declared.begin(), declared.end(), *cells[r]) == declared.end()) {
                    invalid.push_back({row_ids[r], name, *cells[r]});
                    cells[r].reset();
                }
            }
            columns.emplace_back(name, hint->second.kind, std::move(cells), declared);
            continue;
        }

        std::vector<std::string> distinct;
        {
            std::set<std::string> seen;
            for (const auto& cell : cells) {
                if (cell && seen.insert(*cell).second) distinct.push_back(*cell);
            }
        }

        // Export files carry codes; recover the category order from them.
        const auto code_col = position.find(name + "_code");
        if (code_col != position.end()) {
            std::map<long, std::string> by_code;
            for (std::size_t r = 0; r < n; ++r) {
                const auto code = text::parse_number(records[r + 1][code_col->second]);
                if (cells[r] && code) by_code.emplace(static_cast<long>(*code), *cells[r]);
            }
            std::vector<std::string> categories;
            for (auto& [code, value] : by_code) categories.push_back(value);
            ColumnKind kind = categories.size() == 2 ? ColumnKind::Binary : ColumnKind::Categorical;
            if (hint != options.hints.end()) kind = hint->second.kind;
            columns.emplace_back(name, kind, std::move(cells), std::move(categories));
            continue;
        }

        if (hint != options.hints.end()) {
            auto kind = hint->second.kind;
            if (is_categorical(kind)) {
                sort_categories(distinct);
                columns.emplace_back(name, kind, std::move(cells), std::move(distinct));
            } else {
                columns.emplace_back(name, kind, std::move(cells));
            }
            continue;
        }

        const bool numeric = all_numeric(distinct);
        std::size_t longest = 0;
        for (const auto& v : distinct) longest = std::max(longest, v.size());
        const bool few = distinct.size() <= options.max_inferred_levels;
        if (name == options.target || (few && longest <= 64)) {
            sort_categories(distinct);
            const auto kind = distinct.size() == 2 ? ColumnKind::Binary : ColumnKind::Categorical;
            columns.emplace_back(name, kind, std::move(cells), std::move(distinct));
        } else if (numeric) {
            columns.emplace_back(name, ColumnKind::Numeric, std::move(cells));
        } else {
            columns.emplace_back(name, ColumnKind::Text, std::move(cells));
        }
    }
    return AugmentedTable(std::move(row_ids), std::move(columns), options.target, std::move(invalid));
}

AugmentedTable load_csv(const std::filesystem::path& path, const LoadOptions& options) {
    return read_csv_table(text::read_file(path.string()), options);
}

void write_csv(const AugmentedTable& table, std::ostream& out) {
    csv::Record header{"row_id"};
    for (const auto& col : table.columns()) {
        header.push_back(col.name());
        if (is_categorical(col.kind())) header.push_back(col.name() + "_code");
    }
    csv::write_record(out, header);
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        csv::Record rec{table.row_ids()[r]};
        for (const auto& col : table.columns()) {
            rec.push_back(col.cell(r).value_or(""));
            if (is_categorical(col.kind())) {
                const auto code = col.code(r);
                rec.push_back(code ? std::to_string(*code) : "");
            }
        }
        csv::write_record(out, rec);
    }
}

void save_csv(const AugmentedTable& table, const std::filesystem::path& path) {
    std::ostringstream out;
    write_csv(table, out);
    text::write_file(path.string(), out.str());
}

Column encode_ordinal(const Column& column, std::vector<std::string> order) {
    std::vector<std::size_t> bad;
    for (std::size_t r = 0; r < column.size(); ++r) {
        const auto& cell = column.cell(r);
        if (cell && std::find(order.begin(), order.end(), *cell) == order.end()) bad.push_back(r);
    }
    if (!bad.empty()) {
        throw EncodingError("column '" + column.name() + "': value '" + *column.cell(bad.front()) +
                            "' not in the ordinal order at rows " + list_rows(bad));
    }
    const auto kind = order.size() == 2 && column.kind() == ColumnKind::Binary ? ColumnKind::Binary
                                                                                : ColumnKind::Ordinal;
    return Column(column.name(), kind, column.cells(), std::move(order));
}

std::vector<Column> explode_multilabel(const Column& column, std::span<const std::string> labels,
                                       char separator) {
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::string> names;
    std::set<std::string> used;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!index.emplace(labels[i], i).second) {
            throw SchemaError("multilabel label '" + labels[i] + "' listed twice");
        }
        std::string base = column.name() + "_" + to_snake_case(labels[i]);
        std::string name = base;
        for (int k = 2; used.count(name); ++k) name = base + "_" + std::to_string(k);
        used.insert(name);
        names.push_back(std::move(name));
    }

    std::vector<std::vector<Cell>> cells(labels.size(), std::vector<Cell>(column.size(), "0"));
    for (std::size_t r = 0; r < column.size(); ++r) {
        const auto& cell = column.cell(r);
        if (!cell) {
            for (auto& c : cells) c[r].reset();
            continue;
        }
        for (const auto& part : text::split(*cell, separator)) {
            const auto label = text::trim(part);
            if (label.empty()) continue;
            const auto it = index.find(std::string(label));
            if (it == index.end()) {
                throw EncodingError("column '" + column.name() + "' row " + std::to_string(r) +
                                    ": unknown label '" + std::string(label) + "'");
            }
            cells[it->second][r] = "1";
        }
    }
    std::vector<Column> out;
    out.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out.emplace_back(names[i], ColumnKind::Binary, std::move(cells[i]),
                         std::vector<std::string>{"0", "1"});
    }
    return out;
}

std::pair<AugmentedTable, AugmentedTable> split(const AugmentedTable& table, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw SettingsError("train_fraction must lie strictly between 0 and 1");
    }
    const std::size_t n = table.n_rows();
    if (n < 2) throw SettingsError("split needs at least 2 rows");
    const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.train_fraction));
    if (n_train == 0 || n_train == n) {
        throw SettingsError("train_fraction " + text::format_double(spec.train_fraction) +
                            " leaves an empty partition for " + std::to_string(n) + " rows");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(spec.seed);
    rng.shuffle(order);
    std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    return {table.select_rows(train), table.select_rows(test)};
}

AugmentedTable stratified_sample(const AugmentedTable& table, std::string_view column,
                                 std::size_t count, std::uint64_t seed) {
    const auto& col = table.column(column);
    if (!is_categorical(col.kind())) {
        throw SchemaError("stratification column '" + std::string(column) + "' is not categorical");
    }
    std::vector<std::vector<std::size_t>> strata(col.categories().size());
    std::size_t available = 0;
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        if (const auto code = col.code(r)) {
            strata[static_cast<std::size_t>(*code)].push_back(r);
            ++available;
        }
    }
    if (count > available) {
        throw SettingsError("cannot sample " + std::to_string(count) + " rows from " +
                            std::to_string(available));
    }
    // Largest-remainder allocation, ties to the earlier category.
    std::vector<std::size_t> quota(strata.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t s = 0; s < strata.size(); ++s) {
        const double exact = static_cast<double>(count) * static_cast<double>(strata[s].size()) /
                             static_cast<double>(available);
        quota[s] = static_cast<std::size_t>(std::floor(exact));
        assigned += quota[s];
        remainders.emplace_back(exact - std::floor(exact), s);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < count; ++i, ++assigned) ++quota[remainders[i].second];

    Rng rng(seed);
    std::vector<std::size_t> picked;
    for (std::size_t s = 0; s < strata.size(); ++s) {
        auto rows = strata[s];
        rng.shuffle(rows);
        picked.insert(picked.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(quota[s]));
    }
    std::sort(picked.begin(), picked.end());
    return table.select_rows(picked);
}

BinnedTable bin_target(const AugmentedTable& table, const TargetBinning& binning) {
    const auto& target = table.target();
    std::unordered_map<std::string, std::size_t> bin_of;
    std::vector<std::string> labels;
    std::set<std::string> label_set;
    for (std::size_t b = 0; b < binning.bins.size(); ++b) {
        const auto& [label, members] = binning.bins[b];
        if (!label_set.insert(label).second) throw SchemaError("bin label '" + label + "' repeated");
        labels.push_back(label);
        for (const auto& category : members) {
            if (!target.category_index(category)) {
                throw SchemaError("binning maps category '" + category +
                                  "' which the target column '" + target.name() + "' lacks");
            }
            if (!bin_of.emplace(category, b).second) {
                throw SchemaError("category '" + category + "' assigned to more than one bin");
            }
        }
    }
    std::vector<Cell> cells(table.n_rows());
    std::size_t excluded = 0;
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        const auto& cell = target.cell(r);
        if (!cell) continue;
        const auto it = bin_of.find(*cell);
        if (it == bin_of.end()) {
            ++excluded;
        } else {
            cells[r] = labels[it->second];
        }
    }
    const std::string name =
        binning.output_column.empty() ? target.name() + "_bin" : binning.output_column;
    const auto kind = labels.size() == 2 ? ColumnKind::Binary : ColumnKind::Categorical;
    Column binned(name, kind, std::move(cells), std::move(labels));
    return {table.with_column(std::move(binned)).with_target(name), excluded};
}

std::vector<Itemset> to_transactions(const AugmentedTable& table,
                                     std::optional<std::vector<std::string>> attributes) {
    std::vector<const Column*> mined;
    if (attributes) {
        for (const auto& name : *attributes) {
            const auto& col = table.column(name);
            if (!is_categorical(col.kind())) {
                throw SchemaError("column '" + name + "' is not categorical and cannot be mined");
            }
            if (name == table.target_name()) throw SchemaError("target cannot be a mined attribute");
            mined.push_back(&col);
        }
    } else {
        for (const auto& col : table.columns()) {
            if (is_categorical(col.kind()) && col.name() != table.target_name()) mined.push_back(&col);
        }
    }
    const auto& target = table.target();
    std::vector<Itemset> out;
    out.reserve(table.n_rows());
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        if (target.missing(r)) continue;
        Itemset items;
        for (const auto* col : mined) {
            if (const auto& cell = col->cell(r)) items.push_back({col->name(), *cell});
        }
        items.push_back({target.name(), *target.cell(r)});
        out.push_back(std::move(items));
    }
    return out;
}

std::string to_snake_case(std::string_view name) {
    std::string out;
    bool pending_sep = false;
    for (std::size_t i = 0; i < name.size(); ++i) {
        const auto c = static_cast<unsigned char>(name[i]);
        if (std::isalnum(c)) {
            const bool camel_break = std::isupper(c) && i > 0 &&
                                     std::islower(static_cast<unsigned char>(name[i - 1]));
            if ((pending_sep || camel_break) && !out.empty()) out.push_back('_');
            pending_sep = false;
            out.push_back(static_cast<char>(std::tolower(c)));
        } else if (c >= 0x80) {
            if (pending_sep && !out.empty()) out.push_back('_');
            pending_sep = false;
            out.push_back(static_cast<char>(c));
        } else {
            pending_sep = true;
        }
    }
    if (out.empty()) out = "feature";
    if (std::isdigit(static_cast<unsigned char>(out.front()))) out.insert(0, "f_");
    return out;
}

}  // namespace textfeat
