import csv
import logging

from django.http import StreamingHttpResponse

logger = logging.getLogger(__name__)


def dicts_to_csv_response(generator, name="export.csv"):
    response = StreamingHttpResponse(
        dict_to_csv_stream(generator), content_type="text/csv"
    )
    response["Content-Disposition"] = 'attachment; filename="%s"' % name
    return response


class FakeFile(object):
    def write(self, string):
        self._last_string = string


def dict_to_csv_lines(stream, field_names=None):
    writer = None
    fake_file = FakeFile()
    for d in stream:
        if writer is None:
            writer = csv.DictWriter(
                fake_file, field_names or list(d.keys()), lineterminator="\n"
            )
            writer.writeheader()
            yield fake_file._last_string
        writer.writerow(d)
        yield fake_file._last_string


def dict_to_csv_stream(stream):
    for line in dict_to_csv_lines(stream):
        yield line.encode("utf-8")


def rows_to_csv(rows, field_names):
    return "".join(dict_to_csv_lines((row for row in rows), field_names))
