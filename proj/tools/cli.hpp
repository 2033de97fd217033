#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hodn::cli {

enum ExitCode { ok = 0, failure = 1, usage = 2, budget = 3, malformed = 4 };

// A column sweep over m. kind is "criterion" or "rmse".
struct TableSpec {
    std::string kind = "criterion";
    std::vector<int> s_values{1};
    std::vector<std::pair<int, int>> alpha_d{{2, 2}};
    std::string weights = "1";
    int m_lo = 4;
    int m_hi = 15;
    int shifts = 50;
    unsigned long long seed = 0;
    bool sobol = true;
};

TableSpec table_preset(int number);

struct TableData {
    std::vector<std::string> columns;
    std::vector<int> m;
    std::vector<std::vector<double>> rows;
};

// directions may be empty, which drops the Sobol' columns.
TableData run_table(const TableSpec& spec, const std::string& directions);

std::string default_directions_file();

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hodn::cli
