#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "json.hpp"
#include "urnlab/report_io.hpp"

using namespace urnlab;

TEST_SUITE("report_io") {

TEST_CASE("cell formatting") {
  CHECK(format_cell(Cell{}) == "NA");
  CHECK(format_cell(Cell{std::int64_t{-3}}) == "-3");
  CHECK(format_cell(Cell{true}) == "true");
  CHECK(format_cell(Cell{0.25}) == "0.25");
  CHECK(std::stod(format_double(0.1)) == 0.1);
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("kernel dump contains the n=2 middle row") {
  std::ostringstream os;
  write_csv(os, kernel_table(build_kernel({2, 1})), {{"artifact", "x"}});
  const std::string text = os.str();
  CHECK(text.rfind("# artifact: x\ni,j,p\n", 0) == 0);
  CHECK(text.find("\n1,0,0.25\n") != std::string::npos);
  CHECK(text.find("\n1,1,0.5\n") != std::string::npos);
}

TEST_CASE("identity kernel dump") {
  std::ostringstream os;
  write_csv(os, kernel_table(build_kernel({3, 0})));
  CHECK(os.str() == "i,j,p\n0,0,1\n1,1,1\n2,2,1\n3,3,1\n");
}

TEST_CASE("kernel csv round trip") {
  for (const ChainParams p : {ChainParams{2, 1}, ChainParams{37, 9}, ChainParams{20, 20}}) {
    const auto kernel = build_kernel(p);
    std::stringstream ss;
    write_csv(ss, kernel_table(kernel), {{"command", "kernel-dump"}});
    const auto back = read_kernel_csv(ss);
    CHECK(back.n() == p.n);
    CHECK(back.k() == p.k);
    for (int i = 0; i <= p.n; ++i) {
      for (int j = kernel.row_lo(i); j <= kernel.row_hi(i); ++j) CHECK(back(i, j) == kernel(i, j));
    }
  }
  std::istringstream bad("x,y\n");
  CHECK_THROWS(read_kernel_csv(bad));
}

TEST_CASE("json output") {
  Table t{{"a", "b", "c"}, {{std::int64_t{1}, Cell{}, 0.5}, {std::int64_t{2}, std::string("x"), false}}};
  std::ostringstream os;
  write_json(os, t);
  const auto j = nlohmann::json::parse(os.str());
  REQUIRE(j.is_array());
  CHECK(j[0]["a"] == 1);
  CHECK(j[0]["b"].is_null());
  CHECK(j[0]["c"] == 0.5);
  CHECK(j[1]["b"] == "x");
  std::ostringstream csv;
  write_csv(csv, t);
  CHECK(csv.str() == "a,b,c\n1,NA,0.5\n2,x,false\n");
}

TEST_CASE("report table columns") {
  const auto t = report_table({make_report("x", 4, 1, 0.1, 0.2, "<=", 0.0, 10, 99)});
  CHECK(t.columns == std::vector<std::string>{"name", "n", "k", "statistic", "bound", "direction",
                                              "tolerance", "passed", "replicas", "seed"});
  std::ostringstream os;
  write_json(os, t);
  const auto j = nlohmann::json::parse(os.str());
  CHECK(j[0]["seed"] == 99);
  CHECK(j[0]["passed"] == true);
}

TEST_CASE("cutoff table marks missing values") {
  CutoffScanRecord r;
  r.n = 6;
  r.k = 0;
  const auto t = cutoff_table({r});
  std::ostringstream os;
  write_csv(os, t);
  CHECK(os.str().find("6,0,0.25,NA,0,NA,0,false") != std::string::npos);
}

}
