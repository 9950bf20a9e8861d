"""Resource-state builders and request protocols for the four architectures."""

from ghznet.arch.common import ClientKey, DeliveryResult, Request

__all__ = ["ClientKey", "DeliveryResult", "Request"]
