"""LLM agent layer: meteorologist, writer and illustrator over a chat provider.

Modules:
    provider  -- ChatRequest/ChatResponse, OpenAI-compatible and mock providers
    schemas   -- Output schemas and validate_agent_output
    prompts   -- Template-based prompt assembly
    roles     -- Validate-and-retry runs of the three roles
"""

from wxreport.agents.provider import (
    ChatProvider,
    ChatRequest,
    ChatResponse,
    MockProvider,
    OpenAICompatibleProvider,
    ResponseFormat,
    Usage,
    chat_complete,
    load_scripts,
    make_provider,
    prompt_key,
    save_script,
)
from wxreport.agents.schemas import (
    ChartSpec,
    MeteorologistOutput,
    WeatherParam,
    WriterOutput,
    extract_json,
    validate_agent_output,
)
from wxreport.agents.prompts import (
    ILLUSTRATOR,
    METEOROLOGIST,
    ROLES,
    WRITER,
    PromptConfig,
    assemble_illustrator_request,
    assemble_meteorologist_request,
    assemble_writer_request,
    repair_request,
)
from wxreport.agents.roles import (
    AgentTrace,
    Attempt,
    default_chart_specs,
    run_illustrator,
    run_meteorologist,
    run_writer,
)

__all__ = [
    # provider
    "ChatProvider",
    "ChatRequest",
    "ChatResponse",
    "MockProvider",
    "OpenAICompatibleProvider",
    "ResponseFormat",
    "Usage",
    "chat_complete",
    "load_scripts",
    "make_provider",
    "prompt_key",
    "save_script",
    # schemas
    "ChartSpec",
    "MeteorologistOutput",
    "WeatherParam",
    "WriterOutput",
    "extract_json",
    "validate_agent_output",
    # prompts
    "ILLUSTRATOR",
    "METEOROLOGIST",
    "ROLES",
    "WRITER",
    "PromptConfig",
    "assemble_illustrator_request",
    "assemble_meteorologist_request",
    "assemble_writer_request",
    "repair_request",
    # roles
    "AgentTrace",
    "Attempt",
    "default_chart_specs",
    "run_illustrator",
    "run_meteorologist",
    "run_writer",
]
