# Pydantic models shared by services and command routers
