"""datadesk: conversational investigative analytics over tabular datasets.

A library plus CLI/HTTP service that turns journalistic questions into
ordered task lists, compiles them into ML query language (MQL) statements
or aggregation plans, executes them over registered CSV snapshots, and
answers with templated prose and SVG charts.
"""

__version__ = "0.1.0"
