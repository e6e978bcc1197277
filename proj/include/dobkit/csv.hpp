#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dobkit {

/// Locale-independent CSV emitter: '.' decimal separator always, doubles
/// printed with 17 significant digits so values round-trip exactly.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void header(const std::vector<std::string>& names);
    void field(double v);
    void field(long v);
    void field(const std::string& s);
    void end_row();

    static std::string format_double(double v);

private:
    std::ostream& os_;
    bool row_started_ = false;
};

}  // namespace dobkit
