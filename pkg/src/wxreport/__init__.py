"""wxreport: explainable weather forecast reports.

Subpackages and modules:
    ingest       -- Forecast, climatology and geography ingestion (live or fixture)
    diagnostics  -- Fronts, anomalies and hazards over the hourly series
    context      -- EXTERNAL INFO block for the agents
    agents       -- Meteorologist, writer and illustrator over a chat provider
    chart        -- Deterministic SVG line charts
    report       -- Report compilation, Markdown/HTML emission
    pipeline     -- fetch / diagnose / report orchestration
    cli          -- Command-line entry point
"""

__version__ = "0.1.0"
