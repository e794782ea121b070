"""Module implementing XDG directory standard for chargeplan."""

import os
from pathlib import Path


class XDG:
    """
    Class for handling the XDG directory standard.

    :param application_name: Name of application to use XDG directory standard.
    """

    def __init__(self, application_name: str = 'chargeplan') -> None:
        """Contstruct XDG object for application."""
        self.application_name = application_name
        self.XDG_CACHE_HOME = Path(os.environ.get(
            'XDG_CACHE_HOME',
            '~/.cache',
        )).expanduser()
        self.XDG_CONFIG_HOME = Path(os.environ.get(
            'XDG_CONFIG_HOME',
            '~/.config',
        )).expanduser()

    @property
    def cache_home(self) -> Path:
        """
        Return XDG_CACHE_HOME directory of application.

        :return: Path to resolved value of XDG_CACHE_HOME.
        """
        application_cache_home = self.XDG_CACHE_HOME / self.application_name
        application_cache_home.mkdir(parents=True, exist_ok=True)
        return application_cache_home

    @property
    def config_home(self) -> Path:
        """Return XDG_CONFIG_HOME directory of application, not created."""
        return self.XDG_CONFIG_HOME / self.application_name

    def cache(self, resource: str) -> Path:
        """
        Return path to cache resource of application.

        Unlike configuration files, cache files are not touched, as an empty
        file is not a valid cache entry.

        :param resource: Relative string path, i.e. $XDG_CACHE_HOME/<resource>.
        :return: Path to (possibly non-existent) cache resource.
        """
        resource_path = self.cache_home / resource
        resource_path.parent.mkdir(parents=True, exist_ok=True)
        return resource_path
