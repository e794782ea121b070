"""Module for compilation of templated settings files."""

import logging
import os
from pathlib import Path
from typing import Any, Dict

from jinja2 import (
    Environment,
    FileSystemLoader,
    Undefined,
    make_logging_undefined,
)

logger = logging.getLogger(__name__)


def jinja_environment(templates_folder: Path) -> Environment:
    """Return a jinja Environment instance for templates in a folder."""
    LoggingUndefined = make_logging_undefined(
        logger=logger,
        base=Undefined,
    )

    env = Environment(
        loader=FileSystemLoader(
            str(templates_folder),
            followlinks=True,
        ),
        autoescape=False,
        auto_reload=True,
        optimized=True,
        finalize=finalize_variable_expression,
        undefined=LoggingUndefined,
    )

    # Add env context containing all environment variables
    env.globals['env'] = os.environ
    return env


def finalize_variable_expression(result: Any) -> Any:
    """Return empty strings for undefined template variables."""
    if result is None:
        return ''
    else:
        return result


def compile_template_to_string(
    template: Path,
    context: Dict[str, Any],
) -> str:
    """
    Return the compiled template string.

    :param template: Path to Jinja2 template.
    :param context: Placeholder replacements available in the template.
    """
    env = jinja_environment(templates_folder=template.parent)
    jinja_template = env.get_template(name=template.name)
    return jinja_template.render(context)
