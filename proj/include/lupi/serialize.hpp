#ifndef LUPI_SERIALIZE_HPP_
#define LUPI_SERIALIZE_HPP_

#include "lupi/svmplus.hpp"
#include "lupi/wsvm.hpp"

#include <iosfwd>
#include <map>
#include <string>

namespace lupi {

/// 17 significant digits, so parse_double(format_double(v)) == v; infinities print as inf/-inf.
std::string format_double(double v);
/// Fixed number of significant digits, used for result tables.
std::string format_significant(double v, int digits);
double parse_double(const std::string& text);

/// key=value lines; blank lines and lines starting with '#' are skipped.
std::map<std::string, std::string> read_key_values(std::istream& in);

/**
 * Plain-text model record. Only support vectors are stored, each as its
 * training index, coefficient alpha_i y_i and feature row. SVM+ records add the
 * correcting-space expansion. Loaded models support prediction and
 * correcting-function evaluation; dual variables of non-support points are lost.
 */
void write_model(std::ostream& out, const WsvmModel& model);
void write_model(std::ostream& out, const SvmPlusModel& model);

WsvmModel read_wsvm_model(std::istream& in);
SvmPlusModel read_svmplus_model(std::istream& in);

}  // namespace lupi

#endif  // LUPI_SERIALIZE_HPP_
