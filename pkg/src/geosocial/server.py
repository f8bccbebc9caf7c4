"""Service entry point: bind, serve, graceful shutdown."""

from __future__ import annotations

import socket
from typing import Optional

import click
import uvicorn

from .api import create_app_from_config
from .config import ServiceConfig, load_config
from .errors import ValidationError


def serve(config: ServiceConfig) -> None:
    """Run the HTTP service until interrupted.

    The socket is bound before uvicorn starts so configuration and bind
    errors surface immediately; SIGINT/SIGTERM drain in-flight requests.
    """
    app = create_app_from_config(config)
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((config.host, config.port))
    except OSError:
        sock.close()
        raise
    sock.listen(128)
    server = uvicorn.Server(
        uvicorn.Config(app, log_level="info", timeout_graceful_shutdown=10)
    )
    try:
        server.run(sockets=[sock])
    finally:
        sock.close()


@click.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON config file mirroring the service settings.")
@click.option("--bind", default=None, help="host:port to listen on.")
@click.option("--db", default=None, help="sqlite database path.")
def main(config_path: Optional[str], bind: Optional[str], db: Optional[str]):
    """Start the geosocial HTTP service."""
    try:
        config = load_config(config_path, bind=bind, db=db)
    except (ValidationError, OSError, ValueError) as exc:
        raise click.ClickException(str(exc))
    try:
        serve(config)
    except OSError as exc:
        raise click.ClickException(f"cannot bind {config.bind_address}: {exc}")


if __name__ == "__main__":
    main()
